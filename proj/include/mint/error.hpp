#pragma once

#include <stdexcept>
#include <string>

namespace mint {

// Parse errors come from reading term/type/fixture text, domain errors from
// well-formed input that the semantics rejects (unknown operation, failed
// check, divergence in finitary mode), internal errors from broken
// invariants that indicate a bug rather than bad input.
struct MintError : std::runtime_error {
    enum class Kind { Parse, Domain, Internal };
    Kind kind;

    MintError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

inline MintError parse_error(const std::string& msg) { return {MintError::Kind::Parse, msg}; }
inline MintError domain_error(const std::string& msg) { return {MintError::Kind::Domain, msg}; }
inline MintError internal_error(const std::string& msg) { return {MintError::Kind::Internal, msg}; }

}  // namespace mint
