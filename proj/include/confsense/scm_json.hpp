#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "confsense/errors.hpp"
#include "confsense/scm.hpp"

namespace confsense::scm {

/// Serializes a model to its on-disk form: {"nodes": [...]}, one object per
/// node carrying exactly the fields of its kind. Field order is fixed so that
/// load -> save -> load round-trips byte-identically.
inline std::string to_json(const ScmSpec& spec) {
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : spec.nodes) {
        nlohmann::ordered_json jn;
        jn["name"] = n.name;
        jn["kind"] = std::string(to_string(n.kind));
        switch (n.kind) {
            case NodeKind::latent_normal:
                jn["mean"] = n.mean;
                jn["variance"] = n.variance;
                break;
            case NodeKind::threshold_binary: {
                auto parents = nlohmann::ordered_json::array();
                for (const auto& p : n.parents) {
                    parents.push_back({{"name", p.name}, {"coef", p.coef}});
                }
                jn["parents"] = std::move(parents);
                jn["threshold"] = n.threshold;
                break;
            }
            case NodeKind::linear_gaussian: {
                jn["intercept"] = n.intercept;
                auto parents = nlohmann::ordered_json::array();
                for (const auto& p : n.parents) {
                    parents.push_back({{"name", p.name}, {"coef", p.coef}});
                }
                jn["parents"] = std::move(parents);
                jn["noise_variance"] = n.noise_variance;
                break;
            }
        }
        doc["nodes"].push_back(std::move(jn));
    }
    return doc.dump(2) + "\n";
}

inline ScmSpec from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("SCM spec: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw ValidationError("SCM spec: expected an object with a 'nodes' array");
    }
    ScmSpec spec;
    for (const auto& jn : doc["nodes"]) {
        NodeDef n;
        try {
            n.name = jn.at("name").get<std::string>();
            const auto kind = jn.at("kind").get<std::string>();
            if (kind == "latent-normal") {
                n.kind = NodeKind::latent_normal;
                n.mean = jn.at("mean").get<double>();
                n.variance = jn.at("variance").get<double>();
            } else if (kind == "threshold-binary") {
                n.kind = NodeKind::threshold_binary;
                n.threshold = jn.at("threshold").get<double>();
                for (const auto& jp : jn.at("parents")) {
                    n.parents.push_back(
                        {jp.at("name").get<std::string>(), jp.at("coef").get<double>()});
                }
            } else if (kind == "linear-gaussian") {
                n.kind = NodeKind::linear_gaussian;
                n.intercept = jn.at("intercept").get<double>();
                n.noise_variance = jn.at("noise_variance").get<double>();
                for (const auto& jp : jn.at("parents")) {
                    n.parents.push_back(
                        {jp.at("name").get<std::string>(), jp.at("coef").get<double>()});
                }
            } else {
                throw ValidationError("SCM spec: node '" + n.name + "': unknown kind '" + kind +
                                      "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("SCM spec: malformed node entry: ") + e.what());
        }
        spec.nodes.push_back(std::move(n));
    }
    spec.validate();
    return spec;
}

inline ScmSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

inline void save_spec(const std::string& path, const ScmSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write spec file '" + path + "'");
    out << to_json(spec);
}

} // namespace confsense::scm
