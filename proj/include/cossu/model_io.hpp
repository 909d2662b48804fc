#ifndef COSSU_MODEL_IO_HPP
#define COSSU_MODEL_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cossu/coding.hpp"
#include "cossu/encoding.hpp"
#include "cossu/error.hpp"
#include "cossu/rule.hpp"

namespace cossu {

// Model file:
//   {"alphabet": [tokens], "frequencies": {token: count}, "n": int,
//    "precision": int,
//    "rules": [{"antecedent": [tokens], "consequent": [tokens],
//               "weight": "0.dddd"}]}
// Weights are written with exactly `precision` decimals.
inline nlohmann::ordered_json model_to_json(const Model& m) {
    const Alphabet& a = m.alphabet();
    nlohmann::ordered_json j;
    j["alphabet"] = a.tokens();
    nlohmann::ordered_json freq = nlohmann::ordered_json::object();
    for (SymbolId id = 0; id < a.size(); ++id) freq[a.token(id)] = m.frequencies().count(id);
    j["frequencies"] = freq;
    j["n"] = m.frequencies().n();
    j["precision"] = m.precision();
    nlohmann::ordered_json rules = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Rule& r = m.rules()[i];
        auto tokens = [&](const Sequence& s) {
            std::vector<std::string> out;
            for (SymbolId id : s.elements()) out.push_back(a.token(id));
            return out;
        };
        nlohmann::ordered_json jr;
        jr["antecedent"] = tokens(r.antecedent());
        jr["consequent"] = tokens(r.consequent());
        jr["weight"] = format_weight(m.weight(i), m.precision());
        rules.push_back(jr);
    }
    j["rules"] = rules;
    return j;
}

inline std::string model_to_string(const Model& m) { return model_to_json(m).dump(2) + "\n"; }

inline Model model_from_json(const nlohmann::json& j) {
    try {
        const auto tokens = j.at("alphabet").get<std::vector<std::string>>();
        Alphabet alphabet = Alphabet::from_tokens(tokens);
        if (alphabet.size() != tokens.size()) throw Error("model alphabet has duplicate tokens");
        const std::size_t n = j.at("n").get<std::size_t>();
        std::vector<std::size_t> counts(alphabet.size(), 0);
        std::size_t total = 0;
        for (const auto& [token, count] : j.at("frequencies").items()) {
            counts[alphabet.id(token)] = count.get<std::size_t>();
            total += counts[alphabet.id(token)];
        }
        if (total != n) throw Error("model frequencies do not sum to n");
        const int precision = j.at("precision").get<int>();
        if (precision < 1 || precision > 18) throw Error("model precision out of range");

        Model m = Model::empty(alphabet, FrequencyTable(std::move(counts), n), precision);
        std::vector<double> weights(m.size(), 0.0);
        std::vector<bool> seen(m.size(), false);
        for (const auto& jr : j.at("rules")) {
            auto seq = [&](const char* key) {
                return Sequence::from_tokens(m.alphabet(), jr.at(key).get<std::vector<std::string>>());
            };
            Rule r(seq("antecedent"), seq("consequent"));
            const double w = parse_weight(jr.at("weight").get<std::string>());
            if (r.is_singleton()) {
                const SymbolId id = r.consequent().elements()[0];
                if (seen[id]) throw Error("duplicate singleton rule");
                seen[id] = true;
                weights[id] = w;
            } else {
                m.add_rule(std::move(r), w);
                weights.push_back(w);
                seen.push_back(true);
            }
        }
        for (bool s : seen)
            if (!s) throw Error("model lacks a singleton rule");
        m.set_weights(std::move(weights));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed model JSON: ") + e.what());
    }
}

inline void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file '" + path + "'");
    out << model_to_string(m);
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed model JSON in '" + path + "': " + e.what());
    }
    return model_from_json(j);
}

} // namespace cossu

#endif // COSSU_MODEL_IO_HPP
