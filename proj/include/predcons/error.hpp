#ifndef PREDCONS_ERROR_HPP
#define PREDCONS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace predcons {

enum class ErrorCode {
    invalid_size,
    generation_failure,
    infinite_diameter,
    contract_violation,
    invalid_parameter,
    degenerate_parameters,
    out_of_domain,
    out_of_range,
    instability,
    invalid_node,
    precision_loss,
    config,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::generation_failure: return "generation-failure";
    case ErrorCode::infinite_diameter: return "infinite-diameter";
    case ErrorCode::contract_violation: return "contract-violation";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::degenerate_parameters: return "degenerate-parameters";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::instability: return "instability";
    case ErrorCode::invalid_node: return "invalid-node";
    case ErrorCode::precision_loss: return "precision-loss";
    case ErrorCode::config: return "config";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace predcons

#endif
