#include "forge/repl/checker.hpp"

#include "forge/lean/statement.hpp"
#include "forge/repl/protocol.hpp"
#include "forge/repl/simulator.hpp"

namespace forge::repl {

std::string with_proof(std::string_view statement_text, std::string_view proof_text) {
    auto th = lean::parse_statement(statement_text);
    th.doc_comment.reset();
    th.terminator = lean::Terminator::missing;
    // tactic blocks are layout sensitive, so the proof goes in as written
    auto begin = proof_text.find_first_not_of(" \t\r\n");
    auto end = proof_text.find_last_not_of(" \t\r\n");
    std::string_view proof = begin == std::string_view::npos ? "by sorry" : proof_text.substr(begin, end - begin + 1);
    return lean::serialize(th) + " := " + std::string(proof);
}

std::optional<CompileVerdict> PoolChecker::try_check_statement(std::string_view text) {
    auto fut = pool_.try_submit(std::string(text), false);
    if (!fut) return std::nullopt;
    return fut->get();
}

namespace {

CompileVerdict simulate(std::string_view cmd, bool expects_proof) {
    CompileVerdict v;
    v.messages = simulate_elaboration(cmd);
    v.kind = classify_response(v.messages, false, expects_proof);
    v.env_tag = "simulated";
    return v;
}

}  // namespace

CompileVerdict SimulatedChecker::check_statement(std::string_view text) {
    ++calls_;
    return simulate(text, false);
}

CompileVerdict SimulatedChecker::check_proof(std::string_view text, std::string_view proof) {
    ++calls_;
    std::string cmd;
    try {
        cmd = with_proof(text, proof);
    } catch (const Error& e) {
        CompileVerdict v;
        v.messages.push_back({MessageSeverity::error, e.what(), {1, 0}});
        v.env_tag = "simulated";
        return v;
    }
    return simulate(cmd, true);
}

}  // namespace forge::repl
