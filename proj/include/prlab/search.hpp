#pragma once

#include "coloring.hpp"
#include "core.hpp"
#include "patterns.hpp"
#include "structure.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace prlab {

struct SearchConfig {
    std::uint32_t colors = 2;
    bool symmetry_breaking = true;
    std::uint64_t node_budget = 50'000'000;
    std::size_t parallel_width = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (colors == 0)
            throw InputError("at least one color is required");
        if (colors > 64)
            throw InputError("at most 64 colors are supported");
        if (node_budget == 0)
            throw InputError("node budget must be positive");
    }
};

// Every pattern instance of a window as the set of its term values, deduplicated.
struct InstanceIndex {
    std::size_t carrier = 0;
    std::vector<std::vector<Element>> edges;
    std::vector<std::vector<std::uint32_t>> by_element;

    static InstanceIndex build(const GroundStructure& g, const CompiledPattern& cp) {
        InstanceIndex ix;
        ix.carrier = g.size();
        ix.by_element.assign(g.size(), {});
        std::vector<std::vector<Element>> raw;
        detail::scan_assignments(g, cp, nullptr, 0, static_cast<Element>(g.size()),
                                 [&](const std::vector<Element>&, const std::vector<Element>& values, std::uint32_t) {
                                     std::vector<Element> e = values;
                                     std::sort(e.begin(), e.end());
                                     e.erase(std::unique(e.begin(), e.end()), e.end());
                                     raw.push_back(std::move(e));
                                     return false;
                                 });
        std::sort(raw.begin(), raw.end());
        raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
        ix.edges = std::move(raw);
        for (std::uint32_t i = 0; i < ix.edges.size(); ++i)
            for (Element e : ix.edges[i])
                ix.by_element[e].push_back(i);
        return ix;
    }
};

// Least monochromatic instance under the coloring, or none.
inline std::optional<PatternInstance> check_coloring(const GroundStructure& g, const Coloring& coloring,
                                                     const CompiledPattern& cp) {
    return find_monochromatic(g, coloring, cp);
}

enum class AvoidStatus : std::uint8_t { found, none_exact, none_budget };

inline std::string_view to_string(AvoidStatus s) {
    switch (s) {
    case AvoidStatus::found: return "found";
    case AvoidStatus::none_exact: return "none-exact";
    case AvoidStatus::none_budget: return "none-budget";
    }
    return "?";
}

struct AvoidResult {
    AvoidStatus status = AvoidStatus::none_exact;
    std::optional<Coloring> coloring;
    std::uint64_t nodes = 0;
    std::size_t instances = 0;
    std::size_t subtrees = 1;
};

namespace detail {

// Backtracking k-coloring of a hypergraph so that no edge is monochromatic.
// Elements are branched in canonical order, colors in increasing order.
class AvoidSolver {
public:
    AvoidSolver(const InstanceIndex& ix, std::uint32_t k, bool symmetry)
        : ix_(ix), k_(k), symmetry_(symmetry), color_(ix.carrier, kNone), count_(ix.edges.size() * k, 0),
          uncolored_(ix.edges.size()), barred_(ix.carrier * k, 0) {
        for (std::size_t i = 0; i < ix.edges.size(); ++i)
            uncolored_[i] = static_cast<std::uint32_t>(ix.edges[i].size());
    }

    struct Prefix {
        std::vector<std::uint32_t> colors;
    };

    // Valid partial colorings of the first `depth` elements, in search order.
    std::vector<Prefix> prefixes(std::size_t depth) {
        std::vector<Prefix> out;
        depth = std::min(depth, ix_.carrier);
        std::vector<std::uint32_t> cur;
        std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t e, std::uint32_t used) {
            if (e == depth) {
                out.push_back({cur});
                return;
            }
            for (std::uint32_t c = 0; c < k_; ++c) {
                if (!allowed(static_cast<Element>(e), c, used))
                    continue;
                const auto mark = trail_.size();
                const bool ok = assign(static_cast<Element>(e), c);
                if (ok) {
                    cur.push_back(c);
                    rec(e + 1, std::max(used, c + 1));
                    cur.pop_back();
                }
                undo(static_cast<Element>(e), c, mark);
            }
        };
        rec(0, 0);
        return out;
    }

    // Solves below a prefix; returns true when a coloring was found.
    bool solve(const Prefix& prefix, std::uint64_t budget, bool& capped) {
        std::uint32_t used = 0;
        for (std::size_t e = 0; e < prefix.colors.size(); ++e) {
            if (!assign(static_cast<Element>(e), prefix.colors[e]))
                return false;
            used = std::max(used, prefix.colors[e] + 1);
        }
        budget_ = budget;
        capped_ = false;
        const bool found = rec(prefix.colors.size(), used);
        capped = capped_;
        return found;
    }

    std::vector<std::uint32_t> coloring() const { return color_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    static constexpr std::uint32_t kNone = 0xffffffffU;

    bool allowed(Element e, std::uint32_t c, std::uint32_t used) const {
        if (barred_[e * k_ + c])
            return false;
        return !symmetry_ || c <= used;
    }

    bool rec(std::size_t e, std::uint32_t used) {
        if (e == ix_.carrier)
            return true;
        for (std::uint32_t c = 0; c < k_; ++c) {
            if (!allowed(static_cast<Element>(e), c, used))
                continue;
            if (++nodes_ > budget_) {
                capped_ = true;
                return false;
            }
            const auto mark = trail_.size();
            if (assign(static_cast<Element>(e), c) && rec(e + 1, std::max(used, c + 1)))
                return true;
            undo(static_cast<Element>(e), c, mark);
            if (capped_)
                return false;
        }
        return false;
    }

    // Applies e := c with propagation. Always fully applied so undo is uniform;
    // the return value says whether the state is still consistent.
    bool assign(Element e, std::uint32_t c) {
        color_[e] = c;
        bool ok = true;
        for (std::uint32_t id : ix_.by_element[e]) {
            const auto size = static_cast<std::uint32_t>(ix_.edges[id].size());
            --uncolored_[id];
            const auto cnt = ++count_[id * k_ + c];
            if (cnt == size) {
                ok = false;
                continue;
            }
            if (uncolored_[id] == 1 && cnt == size - 1) {
                for (Element u : ix_.edges[id])
                    if (color_[u] == kNone) {
                        ++barred_[u * k_ + c];
                        trail_.push_back({u, c});
                        bool all = true;
                        for (std::uint32_t d = 0; d < k_ && all; ++d)
                            all = barred_[u * k_ + d] != 0;
                        if (all)
                            ok = false;
                        break;
                    }
            }
        }
        return ok;
    }

    void undo(Element e, std::uint32_t c, std::size_t mark) {
        while (trail_.size() > mark) {
            const auto [u, d] = trail_.back();
            --barred_[u * k_ + d];
            trail_.pop_back();
        }
        for (std::uint32_t id : ix_.by_element[e]) {
            ++uncolored_[id];
            --count_[id * k_ + c];
        }
        color_[e] = kNone;
    }

    const InstanceIndex& ix_;
    std::uint32_t k_;
    bool symmetry_;
    std::vector<std::uint32_t> color_;
    std::vector<std::uint32_t> count_;
    std::vector<std::uint32_t> uncolored_;
    std::vector<std::uint32_t> barred_;
    std::vector<std::pair<Element, std::uint32_t>> trail_;
    std::uint64_t nodes_ = 0;
    std::uint64_t budget_ = 0;
    bool capped_ = false;
};

inline std::size_t split_depth(std::uint32_t k) {
    if (k <= 1)
        return 0;
    std::size_t d = 0;
    for (std::uint64_t p = k; p <= 64; p *= k)
        ++d;
    return d;
}

} // namespace detail

// Searches for a k-coloring with no monochromatic instance. The tree is always
// cut into the same prefix subtrees with equal budget shares, whatever the
// worker count, so results do not depend on `parallel_width`.
inline AvoidResult enumerate_avoiding(const InstanceIndex& ix, const SearchConfig& cfg) {
    cfg.validate();
    AvoidResult res;
    res.instances = ix.edges.size();
    detail::AvoidSolver splitter(ix, cfg.colors, cfg.symmetry_breaking);
    const auto prefixes = splitter.prefixes(detail::split_depth(cfg.colors));
    res.subtrees = prefixes.size();
    if (prefixes.empty())
        return res;
    const std::uint64_t share = std::max<std::uint64_t>(1, cfg.node_budget / prefixes.size());

    struct Slot {
        bool done = false;
        bool found = false;
        bool capped = false;
        std::uint64_t nodes = 0;
        std::vector<std::uint32_t> coloring;
    };
    std::vector<Slot> slots(prefixes.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> best{prefixes.size()};
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= prefixes.size() || i > best.load())
                return;
            detail::AvoidSolver s(ix, cfg.colors, cfg.symmetry_breaking);
            Slot& slot = slots[i];
            slot.found = s.solve(prefixes[i], share, slot.capped);
            slot.nodes = s.nodes();
            slot.done = true;
            if (slot.found) {
                slot.coloring = s.coloring();
                std::size_t cur = best.load();
                while (i < cur && !best.compare_exchange_weak(cur, i)) {
                }
            }
        }
    };
    const std::size_t width = std::max<std::size_t>(1, std::min(cfg.parallel_width, prefixes.size()));
    if (width == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < width; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }

    // Node totals only cover subtrees up to the reported one, which every
    // schedule completes.
    bool capped = false;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i].done)
            break;
        res.nodes += slots[i].nodes;
        if (slots[i].found) {
            res.status = AvoidStatus::found;
            res.coloring = Coloring(slots[i].coloring, cfg.colors);
            return res;
        }
        capped = capped || slots[i].capped;
    }
    res.status = capped ? AvoidStatus::none_budget : AvoidStatus::none_exact;
    return res;
}

inline AvoidResult enumerate_avoiding(const GroundStructure& g, const CompiledPattern& cp, const SearchConfig& cfg) {
    return enumerate_avoiding(InstanceIndex::build(g, cp), cfg);
}

enum class ThresholdStatus : std::uint8_t { exact, not_reached, budget };

inline std::string_view to_string(ThresholdStatus s) {
    switch (s) {
    case ThresholdStatus::exact: return "exact";
    case ThresholdStatus::not_reached: return "not-reached";
    case ThresholdStatus::budget: return "budget";
    }
    return "?";
}

struct ThresholdStep {
    std::uint64_t n = 0;
    AvoidStatus status = AvoidStatus::none_exact;
    bool extended = false; // witness obtained by extending the previous one
    std::uint64_t nodes = 0;
};

struct ThresholdResult {
    std::string pattern;
    std::uint32_t colors = 2;
    ThresholdStatus status = ThresholdStatus::not_reached;
    std::uint64_t threshold = 0;          // meaningful when status == exact
    std::uint64_t largest_checked = 0;
    std::optional<Coloring> avoiding_witness; // for threshold - 1 (or the largest avoided window)
    std::vector<ThresholdStep> steps;
};

// `window(n)` must return nested structures: the carrier of window(n) is a
// prefix of window(n+1) with matching operations. Scans n = n_min..n_max.
template <class WindowFamily>
ThresholdResult compute_threshold(WindowFamily&& window, const CompiledPattern& cp, const SearchConfig& cfg,
                                  std::uint64_t n_min, std::uint64_t n_max) {
    cfg.validate();
    ThresholdResult res;
    res.pattern = cp.source;
    res.colors = cfg.colors;
    std::optional<Coloring> witness;
    for (std::uint64_t n = n_min; n <= n_max; ++n) {
        const GroundStructure g = window(n);
        ThresholdStep step{n};
        // An avoiding coloring of the previous window extends by one element
        // in most cases; try that before a full search.
        if (witness && witness->size() + 1 == g.size()) {
            for (std::uint32_t c = 0; c < cfg.colors && !step.extended; ++c) {
                auto colors = witness->colors;
                colors.push_back(c);
                Coloring cand(std::move(colors), cfg.colors);
                if (!check_coloring(g, cand, cp)) {
                    witness = std::move(cand);
                    step.extended = true;
                    step.status = AvoidStatus::found;
                }
            }
        }
        if (!step.extended) {
            auto r = enumerate_avoiding(g, cp, cfg);
            step.status = r.status;
            step.nodes = r.nodes;
            if (r.status == AvoidStatus::found) {
                witness = r.coloring;
            } else {
                res.steps.push_back(step);
                res.largest_checked = n;
                res.avoiding_witness = witness;
                if (r.status == AvoidStatus::none_exact) {
                    res.status = ThresholdStatus::exact;
                    res.threshold = n;
                } else {
                    res.status = ThresholdStatus::budget;
                }
                return res;
            }
        }
        res.steps.push_back(step);
        res.largest_checked = n;
    }
    res.avoiding_witness = witness;
    res.status = ThresholdStatus::not_reached;
    return res;
}

// DIMACS encoding of "k-coloring with no monochromatic instance".
// k = 2: variable e+1 is true iff element e has color 1.
// k >= 3: variable e*k+c+1 means element e has color c, with exactly-one rows.
struct CnfDocument {
    std::uint32_t colors = 2;
    std::size_t elements = 0;
    std::uint32_t variable_count = 0;
    std::vector<std::vector<int>> clauses;
    std::size_t pattern_clauses = 0;

    int variable(Element e, std::uint32_t c) const {
        if (colors == 2)
            return static_cast<int>(e) + 1;
        return static_cast<int>(e * colors + c) + 1;
    }

    // Literal that is true iff element e has color c.
    int literal(Element e, std::uint32_t c) const {
        if (colors == 2)
            return c == 1 ? variable(e, 1) : -variable(e, 1);
        return variable(e, c);
    }

    std::string dimacs(const std::string& comment = {}) const {
        std::ostringstream out;
        if (!comment.empty())
            out << "c " << comment << '\n';
        out << "p cnf " << variable_count << ' ' << clauses.size() << '\n';
        for (const auto& cl : clauses) {
            for (int lit : cl)
                out << lit << ' ';
            out << "0\n";
        }
        return out.str();
    }

    // Sidecar: "var element label color" per line; for k = 2 the line means
    // "true => color 1, false => color 0".
    std::string mapping(const GroundStructure& g) const {
        std::ostringstream out;
        out << "# var element label color\n";
        for (Element e = 0; e < elements; ++e) {
            if (colors == 2) {
                out << variable(e, 1) << ' ' << e << ' ' << g.label(e) << " 1\n";
                continue;
            }
            for (std::uint32_t c = 0; c < colors; ++c)
                out << variable(e, c) << ' ' << e << ' ' << g.label(e) << ' ' << c << '\n';
        }
        return out.str();
    }

    // `model[v]` is the value of variable v (index 0 unused).
    Coloring decode(const std::vector<bool>& model) const {
        if (model.size() < static_cast<std::size_t>(variable_count) + 1)
            throw InputError("model does not cover every variable");
        std::vector<std::uint32_t> out(elements, 0);
        for (Element e = 0; e < elements; ++e) {
            if (colors == 2) {
                out[e] = model[static_cast<std::size_t>(variable(e, 1))] ? 1U : 0U;
                continue;
            }
            int chosen = -1;
            for (std::uint32_t c = 0; c < colors; ++c)
                if (model[static_cast<std::size_t>(variable(e, c))]) {
                    if (chosen >= 0)
                        throw InputError("model assigns two colors to element " + std::to_string(e));
                    chosen = static_cast<int>(c);
                }
            if (chosen < 0)
                throw InputError("model assigns no color to element " + std::to_string(e));
            out[e] = static_cast<std::uint32_t>(chosen);
        }
        return Coloring(std::move(out), colors);
    }

    bool satisfied_by(const std::vector<bool>& model) const {
        for (const auto& cl : clauses) {
            bool sat = false;
            for (int lit : cl) {
                const bool v = model[static_cast<std::size_t>(lit < 0 ? -lit : lit)];
                if ((lit > 0) == v) {
                    sat = true;
                    break;
                }
            }
            if (!sat)
                return false;
        }
        return true;
    }
};

inline CnfDocument export_cnf(const InstanceIndex& ix, std::uint32_t k) {
    if (k < 2)
        throw InputError("CNF export needs at least two colors");
    CnfDocument doc;
    doc.colors = k;
    doc.elements = ix.carrier;
    doc.variable_count = static_cast<std::uint32_t>(k == 2 ? ix.carrier : ix.carrier * k);
    if (k > 2) {
        for (Element e = 0; e < ix.carrier; ++e) {
            std::vector<int> at_least;
            for (std::uint32_t c = 0; c < k; ++c)
                at_least.push_back(doc.variable(e, c));
            doc.clauses.push_back(std::move(at_least));
            for (std::uint32_t a = 0; a < k; ++a)
                for (std::uint32_t b = a + 1; b < k; ++b)
                    doc.clauses.push_back({-doc.variable(e, a), -doc.variable(e, b)});
        }
    }
    for (const auto& edge : ix.edges)
        for (std::uint32_t c = 0; c < k; ++c) {
            std::vector<int> cl;
            for (Element e : edge)
                cl.push_back(-doc.literal(e, c));
            doc.clauses.push_back(std::move(cl));
            ++doc.pattern_clauses;
        }
    return doc;
}

inline CnfDocument export_cnf(const GroundStructure& g, const CompiledPattern& cp, std::uint32_t k) {
    return export_cnf(InstanceIndex::build(g, cp), k);
}

struct ExperimentStats {
    std::uint64_t trials = 0;
    std::uint64_t with_instance = 0;
    double fraction = 0.0;
};

// Fraction of uniformly random colorings that contain a monochromatic
// instance. Colors are drawn as rng() % k from a seeded mt19937_64.
inline ExperimentStats random_coloring_experiment(const GroundStructure& g, const CompiledPattern& cp, std::uint32_t k,
                                                  std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0)
        throw PreconditionError("trials must be at least 1");
    if (k == 0)
        throw InputError("at least one color is required");
    const auto ix = InstanceIndex::build(g, cp);
    std::mt19937_64 rng(seed);
    ExperimentStats st;
    st.trials = trials;
    std::vector<std::uint32_t> colors(g.size());
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (auto& c : colors)
            c = static_cast<std::uint32_t>(rng() % k);
        const bool hit = std::any_of(ix.edges.begin(), ix.edges.end(), [&](const std::vector<Element>& e) {
            return std::all_of(e.begin(), e.end(), [&](Element x) { return colors[x] == colors[e.front()]; });
        });
        st.with_instance += hit ? 1 : 0;
    }
    st.fraction = static_cast<double>(st.with_instance) / static_cast<double>(trials);
    return st;
}

// Named experiment setups.
struct Preset {
    std::string name;
    std::string pattern;
    bool distinct = true;
    std::uint32_t colors = 2;
    std::uint64_t lo = 1;        // nat-window lower end (unused for poly-conjecture)
    std::uint64_t hi = 0;        // default upper end
    std::string note;
};

inline Preset find_preset(const std::string& name) {
    if (name == "hindman990")
        return {name, "{x,y,x+y,x*y}", true, 2, 2, 990,
                "2-colorings of {2..990}; the full instance is meant for an external SAT solver"};
    if (name == "schur")
        return {name, "{x,y,x+y}", false, 2, 1, 12, "x and y may coincide"};
    if (name == "poly-conjecture")
        return {name, "{f,g,f+g,f*g}", true, 2, 1, 2, "truncated N[x]: degree <= 1, coefficients <= 2"};
    throw InputError("unknown preset '" + name + "' (hindman990, schur, poly-conjecture)");
}

// 2-colorings of truncated N[x] avoiding a monochromatic {f, g, f+g, fg}.
inline AvoidResult conjecture_poly_preset(unsigned max_deg, unsigned max_coeff, SearchConfig cfg) {
    const auto g = GroundStructure::poly_nat(max_deg, max_coeff);
    const auto cp = compile_pattern("{f,g,f+g,f*g}");
    return enumerate_avoiding(g, cp, cfg);
}

} // namespace prlab
