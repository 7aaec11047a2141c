#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "confsense/errors.hpp"
#include "confsense/registry_data.hpp"

namespace confsense::registry {

enum class Estimand { ace, cace, rr, odds_ratio, rd, nde, nie, late, multi_treatment };
enum class OutcomeType { binary, continuous, any };
enum class Position { treatment_outcome, mediator_outcome, instrument_outcome };
enum class Metric { risk_ratio, odds_ratio, partial_r2, correlation, probability, coefficient, none };
enum class FunctionalClass {
    assumption_free,
    parametric_linear,
    parametric_nonlinear,
    semiparametric,
    nonparametric
};

inline std::string to_string(Estimand e) {
    switch (e) {
        case Estimand::ace: return "ACE";
        case Estimand::cace: return "CACE";
        case Estimand::rr: return "RR";
        case Estimand::odds_ratio: return "OR";
        case Estimand::rd: return "RD";
        case Estimand::nde: return "NDE";
        case Estimand::nie: return "NIE";
        case Estimand::late: return "LATE";
        case Estimand::multi_treatment: return "multi-treatment";
    }
    return "?";
}

inline std::string to_string(OutcomeType t) {
    switch (t) {
        case OutcomeType::binary: return "binary";
        case OutcomeType::continuous: return "continuous";
        case OutcomeType::any: return "any";
    }
    return "?";
}

inline std::string to_string(Position p) {
    switch (p) {
        case Position::treatment_outcome: return "treatment-outcome";
        case Position::mediator_outcome: return "mediator-outcome";
        case Position::instrument_outcome: return "instrument-outcome";
    }
    return "?";
}

inline std::string to_string(Metric m) {
    switch (m) {
        case Metric::risk_ratio: return "risk-ratio";
        case Metric::odds_ratio: return "odds-ratio";
        case Metric::partial_r2: return "partial-R2";
        case Metric::correlation: return "correlation";
        case Metric::probability: return "probability";
        case Metric::coefficient: return "coefficient";
        case Metric::none: return "none";
    }
    return "?";
}

inline std::string to_string(FunctionalClass c) {
    switch (c) {
        case FunctionalClass::assumption_free: return "assumption-free";
        case FunctionalClass::parametric_linear: return "parametric-linear";
        case FunctionalClass::parametric_nonlinear: return "parametric-nonlinear";
        case FunctionalClass::semiparametric: return "semiparametric";
        case FunctionalClass::nonparametric: return "nonparametric";
    }
    return "?";
}

namespace detail {

template <typename Enum>
Enum parse_enum(std::string_view text, std::initializer_list<Enum> values,
                std::string_view what) {
    for (Enum v : values) {
        if (to_string(v) == text) return v;
    }
    throw ValidationError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

} // namespace detail

inline Estimand estimand_from_string(std::string_view s) {
    return detail::parse_enum(
        s,
        {Estimand::ace, Estimand::cace, Estimand::rr, Estimand::odds_ratio, Estimand::rd,
         Estimand::nde, Estimand::nie, Estimand::late, Estimand::multi_treatment},
        "estimand");
}
inline OutcomeType outcome_type_from_string(std::string_view s) {
    return detail::parse_enum(s, {OutcomeType::binary, OutcomeType::continuous, OutcomeType::any},
                              "outcome type");
}
inline Position position_from_string(std::string_view s) {
    return detail::parse_enum(
        s, {Position::treatment_outcome, Position::mediator_outcome, Position::instrument_outcome},
        "confounder position");
}
inline Metric metric_from_string(std::string_view s) {
    return detail::parse_enum(s,
                              {Metric::risk_ratio, Metric::odds_ratio, Metric::partial_r2,
                               Metric::correlation, Metric::probability, Metric::coefficient,
                               Metric::none},
                              "sensitivity-parameter metric");
}
inline FunctionalClass functional_class_from_string(std::string_view s) {
    return detail::parse_enum(s,
                              {FunctionalClass::assumption_free, FunctionalClass::parametric_linear,
                               FunctionalClass::parametric_nonlinear,
                               FunctionalClass::semiparametric, FunctionalClass::nonparametric},
                              "functional class");
}

struct SensitivityParams {
    int count = 0;
    std::string description;
    Metric metric = Metric::none;
};

struct MethodRecord {
    std::string id;
    std::string citation;
    int year = 0;
    std::vector<Estimand> estimands;
    std::vector<OutcomeType> outcome_types;
    Position position = Position::treatment_outcome;
    SensitivityParams params;
    FunctionalClass functional_class = FunctionalClass::parametric_linear;
    bool covariate_adjustment = false;
    bool distribution_assumption_on_u = false;
    bool implemented_here = false;

    bool handles(Estimand e) const {
        return std::find(estimands.begin(), estimands.end(), e) != estimands.end();
    }
};

/// Ids that are allowed to carry implemented_here = true; they correspond to
/// the numeric modules shipped in this toolkit.
inline const std::set<std::string>& implemented_ids() {
    static const std::set<std::string> ids{"evalue",     "manski",        "ovb",
                                           "copula-rho", "mediation-rho", "bias-formula"};
    return ids;
}

inline void validate_registry(const std::vector<MethodRecord>& records) {
    std::set<std::string> seen;
    for (const auto& r : records) {
        if (r.id.empty()) throw ValidationError("registry: record with empty id");
        if (!seen.insert(r.id).second) {
            throw ValidationError("registry: duplicate id '" + r.id + "'");
        }
        if (r.estimands.empty()) {
            throw ValidationError("registry: '" + r.id + "' lists no estimands");
        }
        if (r.outcome_types.empty()) {
            throw ValidationError("registry: '" + r.id + "' lists no outcome types");
        }
        if (r.params.count < 0) {
            throw ValidationError("registry: '" + r.id + "' has negative parameter count");
        }
        if (r.implemented_here && !implemented_ids().count(r.id)) {
            throw ValidationError("registry: '" + r.id + "' may not claim implemented_here");
        }
    }
}

inline std::vector<MethodRecord> registry_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("registry: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("methods") || !doc["methods"].is_array()) {
        throw ValidationError("registry: expected an object with a 'methods' array");
    }
    std::vector<MethodRecord> out;
    for (const auto& jm : doc["methods"]) {
        MethodRecord r;
        try {
            r.id = jm.at("id").get<std::string>();
            r.citation = jm.at("citation").get<std::string>();
            r.year = jm.at("year").get<int>();
            for (const auto& e : jm.at("estimands")) {
                r.estimands.push_back(estimand_from_string(e.get<std::string>()));
            }
            for (const auto& t : jm.at("outcome_types")) {
                r.outcome_types.push_back(outcome_type_from_string(t.get<std::string>()));
            }
            r.position = position_from_string(jm.at("confounder_position").get<std::string>());
            const auto& jp = jm.at("parameters");
            r.params.count = jp.at("count").get<int>();
            r.params.description = jp.at("description").get<std::string>();
            r.params.metric = metric_from_string(jp.at("metric").get<std::string>());
            r.functional_class =
                functional_class_from_string(jm.at("functional_class").get<std::string>());
            r.covariate_adjustment = jm.at("covariate_adjustment").get<bool>();
            r.distribution_assumption_on_u = jm.at("distribution_assumption_on_u").get<bool>();
            r.implemented_here = jm.at("implemented_here").get<bool>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("registry: malformed method entry: ") + e.what());
        }
        out.push_back(std::move(r));
    }
    validate_registry(out);
    return out;
}

inline std::string registry_to_json(const std::vector<MethodRecord>& records) {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["methods"] = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json jm;
        jm["id"] = r.id;
        jm["citation"] = r.citation;
        jm["year"] = r.year;
        auto est = nlohmann::ordered_json::array();
        for (auto e : r.estimands) est.push_back(to_string(e));
        jm["estimands"] = std::move(est);
        auto types = nlohmann::ordered_json::array();
        for (auto t : r.outcome_types) types.push_back(to_string(t));
        jm["outcome_types"] = std::move(types);
        jm["confounder_position"] = to_string(r.position);
        jm["parameters"] = {{"count", r.params.count},
                            {"description", r.params.description},
                            {"metric", to_string(r.params.metric)}};
        jm["functional_class"] = to_string(r.functional_class);
        jm["covariate_adjustment"] = r.covariate_adjustment;
        jm["distribution_assumption_on_u"] = r.distribution_assumption_on_u;
        jm["implemented_here"] = r.implemented_here;
        doc["methods"].push_back(std::move(jm));
    }
    return doc.dump(2) + "\n";
}

/// The registry bundled with the toolkit.
inline std::vector<MethodRecord> builtin_registry() {
    return registry_from_json(kBuiltinRegistryJson);
}

/// Answers to the six selection steps: estimand, confounder position, metric
/// of confounder influence, covariate-adjustment need, assumptions one is
/// willing to place on the confounder, and the functional class preference.
/// Empty optionals and empty metric lists act as wildcards.
struct WorkflowAnswers {
    std::optional<Estimand> estimand = Estimand::ace;           // step 1
    std::optional<Position> position = Position::treatment_outcome;  // step 2
    std::string identification_note;                            // step 2, free text
    std::vector<Metric> metrics;                                // step 3; empty = any
    bool needs_covariate_adjustment = false;                    // step 4
    std::string confounder_value_type = "continuous";           // step 5
    bool distribution_prior_available = false;                  // step 5
    int confounder_count = 1;                                   // step 5
    bool want_assumption_free = false;                          // step 5
    std::optional<FunctionalClass> functional_preference;       // step 6; empty = no preference
};

inline void validate_answers(const WorkflowAnswers& a) {
    std::vector<std::string> bad;
    static const std::set<std::string> value_types{"binary", "ordinal", "nominal", "continuous"};
    if (!value_types.count(a.confounder_value_type)) bad.push_back("confounder_value_type");
    if (a.confounder_count < 1) bad.push_back("confounder_count");
    if (!bad.empty()) {
        std::string msg = "invalid workflow answers, check field(s):";
        for (const auto& f : bad) msg += " " + f;
        throw ValidationError(msg);
    }
}

inline WorkflowAnswers answers_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("answers: invalid JSON: ") + e.what());
    }
    WorkflowAnswers a;
    try {
        const auto estimand = doc.at("estimand").get<std::string>();
        a.estimand = estimand == "any"
                         ? std::nullopt
                         : std::optional<Estimand>(estimand_from_string(estimand));
        const auto position = doc.at("confounder_position").get<std::string>();
        a.position = position == "any"
                         ? std::nullopt
                         : std::optional<Position>(position_from_string(position));
        a.identification_note = doc.value("identification_note", std::string());
        if (doc.contains("metrics")) {
            for (const auto& m : doc["metrics"]) {
                a.metrics.push_back(metric_from_string(m.get<std::string>()));
            }
        }
        a.needs_covariate_adjustment = doc.value("needs_covariate_adjustment", false);
        a.confounder_value_type = doc.value("confounder_value_type", std::string("continuous"));
        a.distribution_prior_available = doc.value("distribution_prior_available", false);
        a.confounder_count = doc.value("confounder_count", 1);
        a.want_assumption_free = doc.value("want_assumption_free", false);
        const auto pref = doc.value("functional_class_preference", std::string("no-preference"));
        if (pref != "no-preference") a.functional_preference = functional_class_from_string(pref);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("answers: malformed document: ") + e.what());
    }
    validate_answers(a);
    return a;
}

inline std::string answers_to_json(const WorkflowAnswers& a) {
    nlohmann::ordered_json doc;
    doc["estimand"] = a.estimand ? to_string(*a.estimand) : "any";
    doc["confounder_position"] = a.position ? to_string(*a.position) : "any";
    doc["identification_note"] = a.identification_note;
    auto metrics = nlohmann::ordered_json::array();
    for (auto m : a.metrics) metrics.push_back(to_string(m));
    doc["metrics"] = std::move(metrics);
    doc["needs_covariate_adjustment"] = a.needs_covariate_adjustment;
    doc["confounder_value_type"] = a.confounder_value_type;
    doc["distribution_prior_available"] = a.distribution_prior_available;
    doc["confounder_count"] = a.confounder_count;
    doc["want_assumption_free"] = a.want_assumption_free;
    doc["functional_class_preference"] =
        a.functional_preference ? to_string(*a.functional_preference) : "no-preference";
    return doc.dump(2) + "\n";
}

struct RankedMethod {
    std::string id;
    std::string rationale;
    std::vector<std::string> unmet;  // soft criteria (steps 4-5) the method misses
    bool implemented_here = false;
    int year = 0;
};

struct ExcludedMethod {
    std::string id;
    std::string reason;  // the hard criterion that removed it
};

struct Recommendation {
    std::vector<RankedMethod> ranked;
    std::vector<ExcludedMethod> excluded;
    bool has_implemented = false;
};

/// Filters and ranks the registry for one questionnaire. Steps 1 (estimand),
/// 2 (position), 3 (metric; empty list is a wildcard) and 6 (functional
/// class; no preference is a wildcard) exclude; steps 4-5 only demote and are
/// reported as unmet. Rank: fewest unmet, implemented first, newest first,
/// then id.
inline Recommendation recommend(const WorkflowAnswers& answers,
                                const std::vector<MethodRecord>& records) {
    validate_answers(answers);
    validate_registry(records);

    Recommendation rec;
    for (const auto& r : records) {
        if (answers.estimand && !r.handles(*answers.estimand)) {
            rec.excluded.push_back(
                {r.id, "step 1: does not target estimand " + to_string(*answers.estimand)});
            continue;
        }
        if (answers.position && r.position != *answers.position) {
            rec.excluded.push_back(
                {r.id, "step 2: addresses " + to_string(r.position) + " confounding, not " +
                           to_string(*answers.position)});
            continue;
        }
        if (!answers.metrics.empty() &&
            std::find(answers.metrics.begin(), answers.metrics.end(), r.params.metric) ==
                answers.metrics.end()) {
            rec.excluded.push_back(
                {r.id, "step 3: sensitivity parameters use the " + to_string(r.params.metric) +
                           " metric, not one of the requested metrics"});
            continue;
        }
        if (answers.functional_preference && r.functional_class != *answers.functional_preference) {
            rec.excluded.push_back(
                {r.id, "step 6: " + to_string(r.functional_class) + " method, preference was " +
                           to_string(*answers.functional_preference)});
            continue;
        }

        RankedMethod m;
        m.id = r.id;
        m.implemented_here = r.implemented_here;
        m.year = r.year;
        if (answers.needs_covariate_adjustment && !r.covariate_adjustment) {
            m.unmet.push_back("step 4: no covariate adjustment support");
        }
        if (answers.want_assumption_free &&
            r.functional_class != FunctionalClass::assumption_free) {
            m.unmet.push_back("step 5: not assumption-free");
        }
        if (!answers.distribution_prior_available && r.distribution_assumption_on_u) {
            m.unmet.push_back("step 5: needs a distribution assumed on the confounder");
        }
        std::string estimands;
        for (auto e : r.estimands) {
            if (!estimands.empty()) estimands += "/";
            estimands += to_string(e);
        }
        m.rationale = "covers " + estimands + " under " + to_string(r.position) +
                      " confounding via a " + to_string(r.params.metric) + " dial (" +
                      to_string(r.functional_class) + ")";
        m.rationale += r.implemented_here ? "; implemented in this toolkit"
                                          : "; no implementation in this toolkit";
        rec.ranked.push_back(std::move(m));
    }

    std::sort(rec.ranked.begin(), rec.ranked.end(),
              [](const RankedMethod& a, const RankedMethod& b) {
                  if (a.unmet.size() != b.unmet.size()) return a.unmet.size() < b.unmet.size();
                  if (a.implemented_here != b.implemented_here) return a.implemented_here;
                  if (a.year != b.year) return a.year > b.year;
                  return a.id < b.id;
              });
    for (const auto& m : rec.ranked) rec.has_implemented |= m.implemented_here;
    return rec;
}

/// Shown when a questionnaire matches review entries but nothing shipped here
/// can run the numbers.
inline constexpr char kGapMessage[] =
    "no implemented method covers this setting; the reviewed literature offers no "
    "ready-to-run sensitivity analysis here, so it remains an open tooling gap";

} // namespace confsense::registry
