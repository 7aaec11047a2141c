#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "confsense/data_table.hpp"
#include "confsense/errors.hpp"
#include "confsense/math.hpp"
#include "confsense/parallel.hpp"
#include "confsense/rng.hpp"

namespace confsense::scm {

enum class NodeKind { latent_normal, threshold_binary, linear_gaussian };

inline std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::latent_normal: return "latent-normal";
        case NodeKind::threshold_binary: return "threshold-binary";
        case NodeKind::linear_gaussian: return "linear-gaussian";
    }
    return "?";
}

struct Parent {
    std::string name;
    double coef = 0.0;
};

/// One structural equation. Three kinds:
///   latent-normal     X ~ N(mean, variance)
///   threshold-binary  X := 1(Phi(sum coef_i * parent_i) > threshold)
///   linear-gaussian   X ~ N(intercept + sum coef_i * parent_i, noise_variance)
struct NodeDef {
    std::string name;
    NodeKind kind = NodeKind::latent_normal;
    double mean = 0.0;
    double variance = 1.0;
    std::vector<Parent> parents;
    double threshold = 0.5;
    double intercept = 0.0;
    double noise_variance = 1.0;

    static NodeDef latent(std::string name, double mean, double variance) {
        NodeDef n;
        n.name = std::move(name);
        n.kind = NodeKind::latent_normal;
        n.mean = mean;
        n.variance = variance;
        return n;
    }

    static NodeDef threshold_node(std::string name, std::vector<Parent> parents, double q) {
        NodeDef n;
        n.name = std::move(name);
        n.kind = NodeKind::threshold_binary;
        n.parents = std::move(parents);
        n.threshold = q;
        return n;
    }

    static NodeDef linear(std::string name, double intercept, std::vector<Parent> parents,
                          double noise_variance) {
        NodeDef n;
        n.name = std::move(name);
        n.kind = NodeKind::linear_gaussian;
        n.intercept = intercept;
        n.parents = std::move(parents);
        n.noise_variance = noise_variance;
        return n;
    }
};

/// A structural causal model: nodes listed in a valid topological order, so
/// every parent reference points at an earlier node.
struct ScmSpec {
    std::vector<NodeDef> nodes;

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].name == name) return static_cast<int>(i);
        }
        return -1;
    }

    const NodeDef& node(std::string_view name) const {
        const int i = index_of(name);
        if (i < 0) throw ValidationError("no node named '" + std::string(name) + "'");
        return nodes[static_cast<std::size_t>(i)];
    }

    void validate() const {
        std::unordered_set<std::string> seen;
        for (const auto& n : nodes) {
            if (n.name.empty()) throw ValidationError("node with empty name");
            if (!seen.insert(n.name).second) {
                throw ValidationError("duplicate node name '" + n.name + "'");
            }
            if (!std::isfinite(n.mean) || !std::isfinite(n.variance) ||
                !std::isfinite(n.threshold) || !std::isfinite(n.intercept) ||
                !std::isfinite(n.noise_variance)) {
                throw ValidationError("node '" + n.name + "': non-finite parameter");
            }
            switch (n.kind) {
                case NodeKind::latent_normal:
                    if (!(n.variance > 0.0)) {
                        throw ValidationError("node '" + n.name + "': variance must be > 0");
                    }
                    if (!n.parents.empty()) {
                        throw ValidationError("node '" + n.name +
                                              "': latent-normal nodes take no parents");
                    }
                    break;
                case NodeKind::threshold_binary:
                    if (!(n.threshold > 0.0 && n.threshold < 1.0)) {
                        throw ValidationError("node '" + n.name +
                                              "': threshold must lie in (0,1)");
                    }
                    break;
                case NodeKind::linear_gaussian:
                    if (!(n.noise_variance > 0.0)) {
                        throw ValidationError("node '" + n.name +
                                              "': noise variance must be > 0");
                    }
                    break;
            }
            for (const auto& p : n.parents) {
                if (!std::isfinite(p.coef)) {
                    throw ValidationError("node '" + n.name + "': non-finite coefficient on '" +
                                          p.name + "'");
                }
                if (!seen.count(p.name)) {
                    throw ValidationError("node '" + n.name + "': parent '" + p.name +
                                          "' does not precede it");
                }
            }
        }
    }
};

/// The simulation benchmark shipped with this toolkit: a seven-node linear/
/// threshold model with an instrument I, treatment A, mediator M, outcome Y,
/// and three latent confounders tying (I,Y), (A,Y) and (M,Y) together.
inline ScmSpec reference_dgp() {
    ScmSpec spec;
    spec.nodes.push_back(NodeDef::latent("U_IY", 0.0, 1.0));
    spec.nodes.push_back(NodeDef::latent("U_AY", 0.0, 1.0));
    spec.nodes.push_back(NodeDef::latent("U_MY", 0.0, 1.0));
    spec.nodes.push_back(NodeDef::threshold_node("I", {{"U_IY", 1.0}}, 0.6));
    spec.nodes.push_back(NodeDef::threshold_node("A", {{"I", 1.0}, {"U_AY", 1.0}}, 0.7));
    spec.nodes.push_back(NodeDef::linear("M", 0.0, {{"A", -1.5}, {"U_MY", 1.5}}, 1.0));
    spec.nodes.push_back(NodeDef::linear(
        "Y", 0.0, {{"A", 3.0}, {"M", 2.0}, {"U_IY", 1.5}, {"U_AY", 1.0}, {"U_MY", -1.5}}, 1.0));
    return spec;
}

namespace detail {

struct CompiledNode {
    NodeKind kind;
    double mean, sd;          // latent-normal
    double threshold;         // threshold-binary
    double intercept, noise_sd;  // linear-gaussian
    std::vector<std::pair<int, double>> parents;  // (column index, coef)
};

inline std::vector<CompiledNode> compile(const ScmSpec& spec) {
    spec.validate();
    std::unordered_map<std::string, int> idx;
    std::vector<CompiledNode> out;
    out.reserve(spec.nodes.size());
    for (const auto& n : spec.nodes) {
        CompiledNode c;
        c.kind = n.kind;
        c.mean = n.mean;
        c.sd = std::sqrt(n.variance);
        c.threshold = n.threshold;
        c.intercept = n.intercept;
        c.noise_sd = std::sqrt(n.noise_variance);
        for (const auto& p : n.parents) {
            c.parents.emplace_back(idx.at(p.name), p.coef);
        }
        idx.emplace(n.name, static_cast<int>(out.size()));
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace detail

/// Forced node values for counterfactual simulation: either one constant per
/// node (a do() intervention) or one value per row (nested counterfactuals).
struct Interventions {
    std::unordered_map<std::string, double> constants;
    std::unordered_map<std::string, const std::vector<double>*> per_row;

    bool empty() const { return constants.empty() && per_row.empty(); }
};

/// Samples `n` rows. Deterministic for a fixed (spec, n, seed) no matter how
/// many threads run: each node draws from its own counter-mode stream indexed
/// by row. Interventions replace a node's equation; its noise stream is left
/// untouched, so the remaining nodes see identical draws across arms.
inline DataTable simulate(const ScmSpec& spec, std::size_t n, std::uint64_t seed,
                          const Interventions& iv = {}) {
    const auto compiled = detail::compile(spec);
    const std::size_t k = compiled.size();

    std::vector<int> forced_kind(k, 0);  // 0 none, 1 constant, 2 per-row
    std::vector<double> forced_const(k, 0.0);
    std::vector<const std::vector<double>*> forced_rows(k, nullptr);
    for (const auto& [name, value] : iv.constants) {
        const int j = spec.index_of(name);
        if (j < 0) throw ValidationError("intervention on unknown node '" + name + "'");
        forced_kind[static_cast<std::size_t>(j)] = 1;
        forced_const[static_cast<std::size_t>(j)] = value;
    }
    for (const auto& [name, rows] : iv.per_row) {
        const int j = spec.index_of(name);
        if (j < 0) throw ValidationError("intervention on unknown node '" + name + "'");
        if (rows == nullptr || rows->size() != n) {
            throw ValidationError("per-row intervention on '" + name + "' has wrong length");
        }
        forced_kind[static_cast<std::size_t>(j)] = 2;
        forced_rows[static_cast<std::size_t>(j)] = rows;
    }

    std::vector<std::uint64_t> keys(k);
    for (std::size_t j = 0; j < k; ++j) keys[j] = rng::stream_key(seed, j);

    std::vector<std::vector<double>> cols(k, std::vector<double>(n));
    for_each_chunk(n, rng::kChunkSize, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                double v;
                if (forced_kind[j] == 1) {
                    v = forced_const[j];
                } else if (forced_kind[j] == 2) {
                    v = (*forced_rows[j])[i];
                } else {
                    const auto& c = compiled[j];
                    switch (c.kind) {
                        case NodeKind::latent_normal:
                            v = c.mean + c.sd * rng::standard_normal(keys[j], i);
                            break;
                        case NodeKind::threshold_binary: {
                            double index = 0.0;
                            for (const auto& [pj, coef] : c.parents) {
                                index += coef * cols[static_cast<std::size_t>(pj)][i];
                            }
                            v = normal_cdf(index) > c.threshold ? 1.0 : 0.0;
                            break;
                        }
                        case NodeKind::linear_gaussian: {
                            double m = c.intercept;
                            for (const auto& [pj, coef] : c.parents) {
                                m += coef * cols[static_cast<std::size_t>(pj)][i];
                            }
                            v = m + c.noise_sd * rng::standard_normal(keys[j], i);
                            break;
                        }
                        default:
                            v = 0.0;
                    }
                }
                cols[j][i] = v;
            }
        }
    });

    std::vector<std::string> names;
    names.reserve(k);
    for (const auto& nd : spec.nodes) names.push_back(nd.name);
    return DataTable(std::move(names), std::move(cols));
}

namespace detail {

/// Structural edges; a parent listed with coefficient 0 does not enter the
/// child's equation and is treated as absent.
inline std::vector<std::vector<int>> children_of(const ScmSpec& spec) {
    std::vector<std::vector<int>> ch(spec.nodes.size());
    for (std::size_t j = 0; j < spec.nodes.size(); ++j) {
        for (const auto& p : spec.nodes[j].parents) {
            if (p.coef == 0.0) continue;
            ch[static_cast<std::size_t>(spec.index_of(p.name))].push_back(static_cast<int>(j));
        }
    }
    return ch;
}

/// Nodes lying on some directed path from `from` to `to`, optionally treating
/// `blocked` as removed from the graph. Includes the endpoints when a path
/// exists; empty otherwise.
inline std::vector<int> path_nodes(const ScmSpec& spec, int from, int to, int blocked = -1) {
    const std::size_t k = spec.nodes.size();
    const auto children = children_of(spec);

    std::vector<char> desc(k, 0);
    desc[static_cast<std::size_t>(from)] = 1;
    for (std::size_t j = static_cast<std::size_t>(from); j < k; ++j) {
        if (!desc[j] || static_cast<int>(j) == blocked) continue;
        for (int c : children[j]) {
            if (c != blocked) desc[static_cast<std::size_t>(c)] = 1;
        }
    }
    std::vector<char> anc(k, 0);
    anc[static_cast<std::size_t>(to)] = 1;
    for (int j = to; j >= 0; --j) {
        if (!anc[static_cast<std::size_t>(j)] || j == blocked) continue;
        for (const auto& p : spec.nodes[static_cast<std::size_t>(j)].parents) {
            if (p.coef == 0.0) continue;
            const int pj = spec.index_of(p.name);
            if (pj != blocked) anc[static_cast<std::size_t>(pj)] = 1;
        }
    }
    std::vector<int> out;
    for (std::size_t j = 0; j < k; ++j) {
        if (desc[j] && anc[j]) out.push_back(static_cast<int>(j));
    }
    if (!desc[static_cast<std::size_t>(to)]) out.clear();
    return out;
}

/// Sum over directed paths of edge-coefficient products, with everything
/// after the treatment required to be linear-gaussian.
inline double trace_linear(const ScmSpec& spec, int from, int to, int blocked = -1) {
    const auto on_path = path_nodes(spec, from, to, blocked);
    if (on_path.empty()) return 0.0;
    for (int j : on_path) {
        if (j == from) continue;
        if (spec.nodes[static_cast<std::size_t>(j)].kind != NodeKind::linear_gaussian) {
            throw ValidationError("nonlinear path: node '" +
                                  spec.nodes[static_cast<std::size_t>(j)].name +
                                  "' is not linear-gaussian; use a Monte Carlo estimate");
        }
    }
    std::vector<char> on(spec.nodes.size(), 0);
    for (int j : on_path) on[static_cast<std::size_t>(j)] = 1;
    std::vector<double> dp(spec.nodes.size(), 0.0);
    dp[static_cast<std::size_t>(from)] = 1.0;
    for (int j : on_path) {
        if (j == from) continue;
        double acc = 0.0;
        for (const auto& p : spec.nodes[static_cast<std::size_t>(j)].parents) {
            const int pj = spec.index_of(p.name);
            if (on[static_cast<std::size_t>(pj)]) acc += p.coef * dp[static_cast<std::size_t>(pj)];
        }
        dp[static_cast<std::size_t>(j)] = acc;
    }
    return dp[static_cast<std::size_t>(to)];
}

inline bool trace_admissible(const ScmSpec& spec, int from, int to, int blocked = -1) {
    for (int j : path_nodes(spec, from, to, blocked)) {
        if (j == from) continue;
        if (spec.nodes[static_cast<std::size_t>(j)].kind != NodeKind::linear_gaussian) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Total linear effect of `treatment` on `outcome`: the sum over directed
/// paths of products of edge coefficients. Zero when no directed path exists;
/// raises when a non-linear node sits on some path.
inline double path_trace_effect(const ScmSpec& spec, std::string_view treatment,
                                std::string_view outcome) {
    spec.validate();
    const int t = spec.index_of(treatment);
    const int o = spec.index_of(outcome);
    if (t < 0) throw ValidationError("no node named '" + std::string(treatment) + "'");
    if (o < 0) throw ValidationError("no node named '" + std::string(outcome) + "'");
    if (t == o) throw ValidationError("treatment and outcome must differ");
    return detail::trace_linear(spec, t, o);
}

enum class EstimandKind { ace, nde, nie, total, late };

inline std::string_view to_string(EstimandKind k) {
    switch (k) {
        case EstimandKind::ace: return "ACE";
        case EstimandKind::nde: return "NDE";
        case EstimandKind::nie: return "NIE";
        case EstimandKind::total: return "TOTAL";
        case EstimandKind::late: return "LATE";
    }
    return "?";
}

struct EstimandQuery {
    EstimandKind kind = EstimandKind::ace;
    std::string treatment;
    std::string outcome;
    std::optional<std::string> mediator;    // required for NDE/NIE
    std::optional<std::string> instrument;  // required for LATE
    double baseline = 0.0;
    double active = 1.0;
};

enum class TruthMethod { path_trace, monte_carlo };

struct TruthResult {
    double value = 0.0;
    double mc_std_error = 0.0;  // 0 exactly for the path-trace method
    TruthMethod method = TruthMethod::path_trace;
};

namespace detail {

inline void validate_query(const ScmSpec& spec, const EstimandQuery& q) {
    const int t = spec.index_of(q.treatment);
    const int o = spec.index_of(q.outcome);
    if (t < 0) throw ValidationError("no node named '" + q.treatment + "'");
    if (o < 0) throw ValidationError("no node named '" + q.outcome + "'");
    if (t == o) throw ValidationError("treatment and outcome must differ");
    const bool wants_mediator =
        q.kind == EstimandKind::nde || q.kind == EstimandKind::nie;
    if (wants_mediator) {
        if (!q.mediator) throw ValidationError("NDE/NIE queries need a mediator node");
        const int m = spec.index_of(*q.mediator);
        if (m < 0) throw ValidationError("no node named '" + *q.mediator + "'");
        const auto tm = path_nodes(spec, t, m);
        const auto mo = path_nodes(spec, m, o);
        if (tm.empty() || mo.empty()) {
            throw ValidationError("mediator '" + *q.mediator +
                                  "' is not on a directed path from '" + q.treatment +
                                  "' to '" + q.outcome + "'");
        }
    }
    if (q.kind == EstimandKind::late) {
        if (!q.instrument) throw ValidationError("LATE queries need an instrument node");
        if (spec.index_of(*q.instrument) < 0) {
            throw ValidationError("no node named '" + *q.instrument + "'");
        }
    }
}

/// True when the instrument (or anything upstream of it) reaches the outcome
/// by a directed path that avoids the treatment.
inline bool exclusion_violated(const ScmSpec& spec, int instrument, int treatment, int outcome) {
    std::vector<char> anc(spec.nodes.size(), 0);
    anc[static_cast<std::size_t>(instrument)] = 1;
    for (int j = instrument; j >= 0; --j) {
        if (!anc[static_cast<std::size_t>(j)]) continue;
        for (const auto& p : spec.nodes[static_cast<std::size_t>(j)].parents) {
            if (p.coef == 0.0) continue;
            anc[static_cast<std::size_t>(spec.index_of(p.name))] = 1;
        }
    }
    for (std::size_t j = 0; j < spec.nodes.size(); ++j) {
        if (!anc[j]) continue;
        if (!path_nodes(spec, static_cast<int>(j), outcome, treatment).empty()) return true;
    }
    return false;
}

struct McMean {
    double value, se;
};

inline McMean mc_mean(std::span<const double> d) {
    const double m = mean(d);
    double ss = 0.0;
    for (double x : d) ss += (x - m) * (x - m);
    const double var = d.size() > 1 ? ss / static_cast<double>(d.size() - 1) : 0.0;
    return {m, std::sqrt(var / static_cast<double>(d.size()))};
}

} // namespace detail

/// Ground-truth estimand. Uses exact path tracing whenever every node
/// downstream of the intervention is linear-gaussian (mc_std_error = 0);
/// otherwise interventional Monte Carlo with exogenous draws shared across
/// arms, so per-unit contrasts difference out the common noise.
inline TruthResult true_estimand(const ScmSpec& spec, const EstimandQuery& q, std::size_t n_mc,
                                 std::uint64_t seed, bool force_monte_carlo = false) {
    spec.validate();
    detail::validate_query(spec, q);
    const int t = spec.index_of(q.treatment);
    const int o = spec.index_of(q.outcome);
    const double delta = q.active - q.baseline;

    if (q.kind == EstimandKind::late) {
        const int iv = spec.index_of(*q.instrument);
        if (detail::exclusion_violated(spec, iv, t, o)) {
            throw ValidationError("no ground-truth contract for LATE under exclusion violation: '" +
                                  *q.instrument + "' reaches '" + q.outcome +
                                  "' off the treatment path");
        }
    } else if (!force_monte_carlo) {
        const bool mediated = q.kind == EstimandKind::nde || q.kind == EstimandKind::nie;
        const int m = mediated ? spec.index_of(*q.mediator) : -1;
        const bool ok = mediated
                            ? detail::trace_admissible(spec, t, o) &&
                                  detail::trace_admissible(spec, t, o, m)
                            : detail::trace_admissible(spec, t, o);
        if (ok) {
            const double total = detail::trace_linear(spec, t, o) * delta;
            double value = total;
            if (q.kind == EstimandKind::nde) {
                value = detail::trace_linear(spec, t, o, m) * delta;
            } else if (q.kind == EstimandKind::nie) {
                value = total - detail::trace_linear(spec, t, o, m) * delta;
            }
            return {value, 0.0, TruthMethod::path_trace};
        }
    }

    if (n_mc < 1000) {
        throw ValidationError("Monte Carlo truth needs n_mc >= 1000");
    }

    auto cf = [&](const Interventions& iv) { return simulate(spec, n_mc, seed, iv); };
    auto do_treat = [&](double v) {
        Interventions iv;
        iv.constants[q.treatment] = v;
        return iv;
    };

    std::vector<double> d(n_mc);
    switch (q.kind) {
        case EstimandKind::ace:
        case EstimandKind::total: {
            const auto y1 = cf(do_treat(q.active));
            const auto y0 = cf(do_treat(q.baseline));
            const auto& a = y1.column(q.outcome);
            const auto& b = y0.column(q.outcome);
            for (std::size_t i = 0; i < n_mc; ++i) d[i] = a[i] - b[i];
            const auto r = detail::mc_mean(d);
            return {r.value, r.se, TruthMethod::monte_carlo};
        }
        case EstimandKind::nde:
        case EstimandKind::nie: {
            const auto arm0 = cf(do_treat(q.baseline));
            const auto arm1 = cf(do_treat(q.active));
            const auto& m0 = arm0.column(*q.mediator);
            Interventions mixed = do_treat(q.active);
            mixed.per_row[*q.mediator] = &m0;
            const auto cross = cf(mixed);  // Y(active, M(baseline))
            const auto& y_cross = cross.column(q.outcome);
            if (q.kind == EstimandKind::nde) {
                const auto& y0 = arm0.column(q.outcome);
                for (std::size_t i = 0; i < n_mc; ++i) d[i] = y_cross[i] - y0[i];
            } else {
                const auto& y1 = arm1.column(q.outcome);
                for (std::size_t i = 0; i < n_mc; ++i) d[i] = y1[i] - y_cross[i];
            }
            const auto r = detail::mc_mean(d);
            return {r.value, r.se, TruthMethod::monte_carlo};
        }
        case EstimandKind::late: {
            Interventions on, off;
            on.constants[*q.instrument] = 1.0;
            off.constants[*q.instrument] = 0.0;
            const auto arm_on = cf(on);
            const auto arm_off = cf(off);
            const auto treat1 = cf(do_treat(q.active));
            const auto treat0 = cf(do_treat(q.baseline));
            const auto& a1 = arm_on.column(q.treatment);
            const auto& a0 = arm_off.column(q.treatment);
            const auto& y1 = treat1.column(q.outcome);
            const auto& y0 = treat0.column(q.outcome);
            std::vector<double> dc;
            dc.reserve(n_mc);
            for (std::size_t i = 0; i < n_mc; ++i) {
                if (a1[i] == 1.0 && a0[i] == 0.0) dc.push_back(y1[i] - y0[i]);
            }
            if (dc.empty()) throw NumericError("LATE: no compliers in the Monte Carlo sample");
            const auto r = detail::mc_mean(dc);
            return {r.value, r.se, TruthMethod::monte_carlo};
        }
    }
    throw NumericError("unreachable estimand kind");
}

} // namespace confsense::scm
