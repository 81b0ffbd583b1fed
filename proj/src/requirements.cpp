#include "refold/requirements.hpp"

#include "refold/parser.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace refold {

std::string_view abstraction_name(Abstraction a)
{
    switch (a) {
    case Abstraction::less_abstract: return "LessAbstract";
    case Abstraction::more_abstract: return "MoreAbstract";
    case Abstraction::equivalent: return "Equivalent";
    case Abstraction::incomparable: return "Incomparable";
    }
    return "?";
}

std::string_view outcome_name(OutcomeKind k)
{
    switch (k) {
    case OutcomeKind::promoted_to_abstract: return "PromotedToAbstract";
    case OutcomeKind::replaced: return "Replaced";
    case OutcomeKind::new_dimension: return "NewDimension";
    case OutcomeKind::duplicate: return "Duplicate";
    }
    return "?";
}

Abstraction abstraction_relation(const Requirement& a, const Requirement& b, const Bounds& bounds)
{
    Machine ma = Machine::of(a.spec);
    Machine mb = Machine::of(b.spec);
    bool ab = refines(ma, mb, bounds).holds;
    bool ba = refines(mb, ma, bounds).holds;
    if (ab && ba)
        return Abstraction::equivalent;
    if (ab)
        return Abstraction::less_abstract;
    if (ba)
        return Abstraction::more_abstract;
    return Abstraction::incomparable;
}

const Requirement* RequirementLedger::find(std::string_view id) const
{
    for (const auto& level : levels)
        for (const auto& r : level)
            if (r.id == id)
                return &r;
    return nullptr;
}

std::optional<std::size_t> RequirementLedger::level_of(std::string_view id) const
{
    for (std::size_t k = 0; k < levels.size(); ++k)
        for (const auto& r : levels[k])
            if (r.id == id)
                return k;
    return std::nullopt;
}

namespace {

// Keeps each level in insertion order.
void place(RequirementLedger& ledger, std::size_t level, Requirement r)
{
    if (ledger.levels.size() <= level)
        ledger.levels.resize(level + 1);
    auto rank = [&](const std::string& id) {
        return std::find(ledger.history.begin(), ledger.history.end(), id) - ledger.history.begin();
    };
    auto& l = ledger.levels[level];
    auto pos = std::find_if(l.begin(), l.end(), [&](const Requirement& x) { return rank(x.id) > rank(r.id); });
    l.insert(pos, std::move(r));
}

} // namespace

Component conjunction(const std::vector<Requirement>& reqs, const Interface& iface, const std::string& name)
{
    Component c;
    c.name = name;
    c.requirement = true;
    c.generated = true;
    for (std::size_t i = 0; i < iface.inputs.size(); ++i)
        c.channels.push_back({iface.inputs.names[i], Direction::input, iface.inputs.domains[i], std::nullopt});
    for (std::size_t i = 0; i < iface.outputs.size(); ++i)
        c.channels.push_back({iface.outputs.names[i], Direction::output, iface.outputs.domains[i], std::nullopt});
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        const Component& spec = reqs[i].spec;
        const std::string prefix = "__r" + std::to_string(i) + "_";
        std::map<std::string, std::string> renames;
        for (const auto& v : spec.vars) {
            VarDecl copy = v;
            copy.span.reset();
            copy.name = prefix + v.name;
            renames[v.name] = copy.name;
            c.vars.push_back(std::move(copy));
        }
        for (const auto& f : spec.formulas) {
            Formula copy = f;
            copy.span.reset();
            copy.label = prefix + f.label;
            copy.guard = rename_reads(f.guard, renames);
            for (auto& a : copy.atoms) {
                if (auto it = renames.find(a.target); it != renames.end())
                    a.target = it->second;
                if (a.kind == Atom::Kind::equals)
                    a.value = rename_reads(a.value, renames);
            }
            c.formulas.push_back(std::move(copy));
        }
    }
    return c;
}

LevelSoundness check_level_soundness(const RequirementLedger& ledger, std::size_t k, const Bounds& bounds)
{
    if (!ledger.iface || k + 1 >= ledger.levels.size())
        throw Error(Code::usage, "ledger has no level pair " + std::to_string(k) + "/" + std::to_string(k + 1));
    Component lower = conjunction(ledger.levels[k], *ledger.iface, "level" + std::to_string(k));
    Component upper = conjunction(ledger.levels[k + 1], *ledger.iface, "level" + std::to_string(k + 1));
    return {k, refines(lower, upper, bounds)};
}

AddResult add_requirement(const RequirementLedger& ledger, Requirement r, const Bounds& bounds)
{
    require_valid(r.spec);
    const Interface iface = interface_of(r.spec);
    if (ledger.iface && !(iface == *ledger.iface))
        throw Error(Code::iface_mismatch, "requirement `" + r.id + "` has interface " + describe(iface) +
                                              ", the ledger uses " + describe(*ledger.iface));

    AddResult out;
    out.ledger = ledger;
    out.ledger.iface = iface;
    InsertionOutcome& oc = out.outcome;

    // relation of R to every ledgered requirement: R vs L
    std::vector<std::vector<Abstraction>> rel(ledger.levels.size());
    for (std::size_t k = 0; k < ledger.levels.size(); ++k) {
        for (const auto& l : ledger.levels[k]) {
            Abstraction a = abstraction_relation(r, l, bounds);
            if (a == Abstraction::equivalent) {
                oc.kind = OutcomeKind::duplicate;
                oc.duplicate_of = l.id;
                oc.level = k;
                return out;
            }
            rel[k].push_back(a);
        }
    }
    // a reused id is only an error when the specs differ
    if (ledger.find(r.id))
        throw Error(Code::dup_id, "the ledger already has a different requirement `" + r.id + "`");

    for (std::size_t k = 1; k < rel.size(); ++k)
        for (std::size_t i = 0; i < rel[k].size(); ++i)
            if (rel[k][i] != Abstraction::incomparable)
                oc.notes.push_back("`" + r.id + "` vs `" + ledger.levels[k][i].id + "` (level " + std::to_string(k) +
                                   "): " + std::string(abstraction_name(rel[k][i])));

    std::vector<std::size_t> implied, implying;
    if (!rel.empty()) {
        for (std::size_t i = 0; i < rel[0].size(); ++i) {
            if (rel[0][i] == Abstraction::less_abstract)
                implied.push_back(i);  // R => Li
            else if (rel[0][i] == Abstraction::more_abstract)
                implying.push_back(i);  // Li => R
        }
    }

    RequirementLedger& lg = out.ledger;
    lg.history.push_back(r.id);
    if (!implied.empty()) {
        oc.kind = OutcomeKind::replaced;
        oc.level = 0;
        std::vector<Requirement> displaced;
        for (auto it = implied.rbegin(); it != implied.rend(); ++it) {
            displaced.insert(displaced.begin(), lg.levels[0][*it]);
            lg.levels[0].erase(lg.levels[0].begin() + static_cast<long>(*it));
        }
        place(lg, 0, std::move(r));
        for (auto& d : displaced) {
            oc.displaced.push_back(d.id);
            place(lg, 1, std::move(d));
        }
        oc.touched_levels = {0, 1};
    } else if (!implying.empty()) {
        oc.kind = OutcomeKind::promoted_to_abstract;
        oc.level = 1;
        oc.witness = lg.levels[0][implying.front()].id;
        place(lg, 1, std::move(r));
        oc.touched_levels = {1};
    } else {
        oc.kind = OutcomeKind::new_dimension;
        oc.level = 0;
        place(lg, 0, std::move(r));
        oc.touched_levels = {0};
    }

    std::set<std::size_t> pairs;
    for (std::size_t k : oc.touched_levels) {
        if (k > 0)
            pairs.insert(k - 1);
        pairs.insert(k);
    }
    for (std::size_t k : pairs)
        if (k + 1 < lg.levels.size())
            oc.soundness.push_back(check_level_soundness(lg, k, bounds));
    return out;
}

SystemCheck check_system(const Component& system, const RequirementLedger& ledger, const Bounds& bounds)
{
    SystemCheck out;
    if (ledger.levels.empty())
        return out;
    Machine sys = Machine::of(system);
    for (const auto& l : ledger.levels[0]) {
        auto v = refines(sys, Machine::of(l.spec), bounds);
        out.holds = out.holds && v.holds;
        out.verdicts.push_back({l.id, std::move(v)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

bool is_level_dir(const std::filesystem::directory_entry& e)
{
    const std::string name = e.path().filename().string();
    return e.is_directory() && name.size() > 5 && name.rfind("level", 0) == 0 &&
           std::all_of(name.begin() + 5, name.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

void save_ledger(const RequirementLedger& ledger, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(Code::io, "cannot create `" + dir.string() + "`: " + ec.message());
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (is_level_dir(e))
            std::filesystem::remove_all(e.path());
    std::string index;
    for (const auto& id : ledger.history) {
        auto k = ledger.level_of(id);
        if (!k)
            continue;
        index += id + " " + std::to_string(*k) + "\n";
    }
    for (std::size_t k = 0; k < ledger.levels.size(); ++k) {
        std::filesystem::path ldir = dir / ("level" + std::to_string(k));
        std::filesystem::create_directories(ldir);
        for (const auto& r : ledger.levels[k])
            write_file(ldir / (r.id + ".fspec"), render_component(r.spec));
    }
    write_file(dir / "index", index);
}

RequirementLedger load_ledger(const std::filesystem::path& dir)
{
    RequirementLedger ledger;
    if (!std::filesystem::exists(dir / "index"))
        return ledger;
    std::istringstream in(read_file(dir / "index"));
    std::string line;
    int lineno = 0;
    std::vector<std::pair<Requirement, std::size_t>> entries;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream words(line);
        std::string id;
        std::size_t level = 0;
        std::string rest;
        if (!(words >> id))
            continue;
        if (!(words >> level) || (words >> rest) || !is_identifier(id))
            throw Error(Code::syntax, (dir / "index").string() + ":" + std::to_string(lineno) + ": expected `ID LEVEL`");
        auto comp = load_component(dir / ("level" + std::to_string(level)) / (id + ".fspec"));
        if (!comp)
            throw Error(comp.diagnostics.front().code, "ledger entry `" + id + "` does not load:\n" +
                                                           format_diagnostics(comp.diagnostics),
                        comp.diagnostics);
        if (ledger.find(id) || std::find(ledger.history.begin(), ledger.history.end(), id) != ledger.history.end())
            throw Error(Code::dup_id, "ledger index lists `" + id + "` twice");
        Interface iface = interface_of(*comp);
        if (ledger.iface && !(iface == *ledger.iface))
            throw Error(Code::iface_mismatch, "ledger entry `" + id + "` has interface " + describe(iface));
        ledger.iface = iface;
        ledger.history.push_back(id);
        place(ledger, level, Requirement{id, std::move(*comp)});
    }
    return ledger;
}

} // namespace refold
