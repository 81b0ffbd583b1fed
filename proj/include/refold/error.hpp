#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace refold {

enum class Code {
    // syntax and model well-formedness
    syntax,
    type,
    dup_name,
    dup_label,
    bad_name,
    reserved,
    label_clash,
    domain,
    init,
    unknown_symbol,
    target_input,
    target_state,
    next_epoch,
    dup_target,
    read_output,
    range,
    no_output,
    empty_consequent,
    // files and manifests
    missing_file,
    layer_gap,
    io,
    usage,
    // semantics
    budget,
    inconsistent,
    cycle,
    domain_mismatch,
    output_clash,
    bad_hide,
    invalid,
    // causality and decomposition
    mixed_target,
    nothing_to_split,
    local_state_dep,
    local_cycle,
    local_mixed,
    unknown_local,
    out_targets_state,
    out_shared,
    unknown_output,
    // refinement and requirements
    iface_mismatch,
    size,
    layer1,
    empty_layer,
    bad_target,
    dup_id,
};

/// Stable identifier such as "E_RANGE".
std::string_view code_name(Code code);

struct SourceSpan {
    std::string file;
    int line = 0;
    int column = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

std::ostream& operator<<(std::ostream& os, const SourceSpan& span);

struct Diagnostic {
    Code code;
    std::string message;
    std::string formula;                  // label of the offending formula, if any
    std::optional<std::size_t> position;  // formula index when no span is known
    std::optional<SourceSpan> span;
    std::optional<SourceSpan> related;    // e.g. the first declaration of a duplicate
};

std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

/// Thrown by operations whose contract has an error outcome. Validation and
/// parsing report through Diagnostic lists instead.
class Error : public std::runtime_error {
public:
    Error(Code code, const std::string& message, std::vector<Diagnostic> details = {});

    [[nodiscard]] Code code() const noexcept { return code_; }
    [[nodiscard]] const std::vector<Diagnostic>& details() const noexcept { return details_; }

private:
    Code code_;
    std::vector<Diagnostic> details_;
};

/// Either a value or the diagnostics explaining why there is none.
template <class T>
struct Result {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return value.has_value(); }
    explicit operator bool() const { return ok(); }
    T& operator*() { return *value; }
    const T& operator*() const { return *value; }
    T* operator->() { return &*value; }
    const T* operator->() const { return &*value; }
};

} // namespace refold
