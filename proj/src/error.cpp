#include "refold/error.hpp"

#include <sstream>

namespace refold {

std::string_view code_name(Code code)
{
    switch (code) {
    case Code::syntax: return "E_SYNTAX";
    case Code::type: return "E_TYPE";
    case Code::dup_name: return "E_DUP_NAME";
    case Code::dup_label: return "E_DUP_LABEL";
    case Code::bad_name: return "E_BAD_NAME";
    case Code::reserved: return "E_RESERVED";
    case Code::label_clash: return "E_LABEL_CLASH";
    case Code::domain: return "E_DOMAIN";
    case Code::init: return "E_INIT";
    case Code::unknown_symbol: return "E_UNKNOWN_SYMBOL";
    case Code::target_input: return "E_TARGET_INPUT";
    case Code::target_state: return "E_TARGET_STATE";
    case Code::next_epoch: return "E_NEXT_EPOCH";
    case Code::dup_target: return "E_DUP_TARGET";
    case Code::read_output: return "E_READ_OUTPUT";
    case Code::range: return "E_RANGE";
    case Code::no_output: return "E_NO_OUTPUT";
    case Code::empty_consequent: return "E_EMPTY_CONSEQUENT";
    case Code::missing_file: return "E_MISSING_FILE";
    case Code::layer_gap: return "E_LAYER_GAP";
    case Code::io: return "E_IO";
    case Code::usage: return "E_USAGE";
    case Code::budget: return "E_BUDGET";
    case Code::inconsistent: return "E_INCONSISTENT";
    case Code::cycle: return "E_CYCLE";
    case Code::domain_mismatch: return "E_DOMAIN_MISMATCH";
    case Code::output_clash: return "E_OUTPUT_CLASH";
    case Code::bad_hide: return "E_BAD_HIDE";
    case Code::invalid: return "E_INVALID";
    case Code::mixed_target: return "E_MIXED_TARGET";
    case Code::nothing_to_split: return "E_NOTHING_TO_SPLIT";
    case Code::local_state_dep: return "E_LOCAL_STATE_DEP";
    case Code::local_cycle: return "E_LOCAL_CYCLE";
    case Code::local_mixed: return "E_LOCAL_MIXED";
    case Code::unknown_local: return "E_UNKNOWN_LOCAL";
    case Code::out_targets_state: return "E_OUT_TARGETS_STATE";
    case Code::out_shared: return "E_OUT_SHARED";
    case Code::unknown_output: return "E_UNKNOWN_OUTPUT";
    case Code::iface_mismatch: return "E_IFACE_MISMATCH";
    case Code::size: return "E_SIZE";
    case Code::layer1: return "E_LAYER1";
    case Code::empty_layer: return "E_EMPTY_LAYER";
    case Code::bad_target: return "E_BAD_TARGET";
    case Code::dup_id: return "E_DUP_ID";
    }
    return "E_UNKNOWN";
}

std::ostream& operator<<(std::ostream& os, const SourceSpan& span)
{
    return os << (span.file.empty() ? "<input>" : span.file) << ':' << span.line << ':' << span.column;
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d)
{
    if (d.span)
        os << *d.span << ": ";
    os << code_name(d.code) << ": " << d.message;
    if (!d.formula.empty())
        os << " [formula " << d.formula << ']';
    else if (d.position)
        os << " [formula #" << *d.position << ']';
    if (d.related)
        os << " (see " << *d.related << ')';
    return os;
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags)
{
    std::ostringstream os;
    for (const auto& d : diags)
        os << d << '\n';
    return os.str();
}

Error::Error(Code code, const std::string& message, std::vector<Diagnostic> details)
    : std::runtime_error(std::string(code_name(code)) + ": " + message), code_(code),
      details_(std::move(details))
{
}

} // namespace refold
