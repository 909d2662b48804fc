#ifndef COSSU_CLI_HPP
#define COSSU_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cossu/cossu.hpp"

namespace cossu::cli {

namespace fs = std::filesystem;

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    bool json = false;
};

struct MiningOptions {
    std::size_t minsup = 2;
    std::size_t max_pattern_len = 20;
    int passes = 1;
    double tolerance = 1e-3;
    std::vector<double> bounds{1e-6, 1e3};
    int precision = kDefaultPrecision;
    bool fast_screen = false;
    bool trace = false;

    MiningConfig config(std::ostream& trace_stream) const {
        MiningConfig cfg;
        cfg.minsup = minsup;
        cfg.max_pattern_len = max_pattern_len;
        cfg.optimizer.passes = passes;
        cfg.optimizer.tolerance = tolerance;
        cfg.optimizer.lower = bounds.at(0);
        cfg.optimizer.upper = bounds.at(1);
        cfg.precision = precision;
        cfg.fast_screen = fast_screen;
        cfg.trace = trace ? &trace_stream : nullptr;
        cfg.optimizer.validate();
        return cfg;
    }
};

inline void add_mining_options(CLI::App* sub, MiningOptions& o) {
    sub->add_option("--minsup", o.minsup, "Minimum support of closed patterns")->check(CLI::Range(2, 1 << 30));
    sub->add_option("--max-pattern-len", o.max_pattern_len, "Longest closed pattern turned into rules")
        ->check(CLI::PositiveNumber);
    sub->add_option("--opt-passes", o.passes, "Coordinate-descent passes per weight adjustment")
        ->check(CLI::PositiveNumber);
    sub->add_option("--opt-tol", o.tolerance, "Golden-section tolerance on the weight axis")
        ->check(CLI::PositiveNumber);
    sub->add_option("--opt-bounds", o.bounds, "Golden-section bracket lo,hi")->delimiter(',')->expected(2);
    sub->add_option("--precision", o.precision, "Decimal digits kept for rule weights")->check(CLI::Range(1, 18));
    sub->add_flag("--fast-screen", o.fast_screen, "Screen candidates by optimizing only the new weight");
    sub->add_flag("--trace", o.trace, "Log every selection step to stderr as key=value lines");
}

struct SynthOptions {
    std::size_t n = 5000;
    std::vector<std::string> alphabet{"A", "B", "C", "D", "E"};
    std::string dist = "uniform";
    std::vector<std::string> rules;
    double ip = 0.5;
};

inline void add_synth_options(CLI::App* sub, SynthOptions& o) {
    sub->add_option("--n", o.n, "Sequence length")->check(CLI::PositiveNumber);
    sub->add_option("--alphabet", o.alphabet, "Comma-separated symbols")->delimiter(',');
    sub->add_option("--dist", o.dist, "'uniform' or comma-separated probabilities in --alphabet order");
    sub->add_option("--rules", o.rules, "Planted rules, e.g. \"A->B\" (repeat or separate with ';')");
    sub->add_option("--ip", o.ip, "Insertion probability")->check(CLI::Range(0.0, 1.0));
}

inline SyntheticSpec make_spec(const SynthOptions& o, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.alphabet = Alphabet::from_tokens(o.alphabet);
    if (spec.alphabet.size() != o.alphabet.size()) throw CLI::ValidationError("--alphabet", "duplicate symbols");
    spec.n = o.n;
    spec.insertion_probability = o.ip;
    spec.seed = seed;
    if (o.dist != "uniform") {
        std::vector<double> given;
        std::stringstream ss(o.dist);
        for (std::string item; std::getline(ss, item, ',');) given.push_back(std::stod(item));
        if (given.size() != o.alphabet.size())
            throw CLI::ValidationError("--dist", "needs one probability per alphabet symbol");
        spec.distribution.assign(spec.alphabet.size(), 0.0);
        for (std::size_t i = 0; i < o.alphabet.size(); ++i) spec.distribution[spec.alphabet.id(o.alphabet[i])] = given[i];
    }
    for (const auto& group : o.rules) {
        std::stringstream ss(group);
        for (std::string item; std::getline(ss, item, ';');)
            if (item.find_first_not_of(" \t") != std::string::npos) spec.targets.push_back(parse_rule(spec.alphabet, item));
    }
    spec.validate();
    return spec;
}

inline nlohmann::ordered_json rules_to_json(const Alphabet& a, const std::vector<Rule>& rules) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Rule& r : rules) {
        std::vector<std::string> ante, cons;
        for (SymbolId id : r.antecedent().elements()) ante.push_back(a.token(id));
        for (SymbolId id : r.consequent().elements()) cons.push_back(a.token(id));
        arr.push_back({{"antecedent", ante}, {"consequent", cons}});
    }
    return arr;
}

inline std::string join_rules(const Alphabet& a, const std::vector<Rule>& rules) {
    std::string out;
    for (std::size_t i = 0; i < rules.size(); ++i) out += (i ? "; " : "") + to_string(a, rules[i]);
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

inline std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--tau-grid", "'" + item + "' is not a number");
        }
    }
    return out;
}

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

// ---------------------------------------------------------------------------

inline int cmd_mine(const std::string& seq_path, const std::string& out_path, bool char_mode,
                    const MiningOptions& mo, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    const auto tokens = read_tokens(seq_path, char_mode);
    if (tokens.empty()) throw Error("empty input: '" + seq_path + "' has no symbols");
    const Alphabet alphabet = Alphabet::from_tokens(tokens);
    const Sequence seq = Sequence::from_tokens(alphabet, tokens);
    const MiningResult res = cossu_mine_detailed(alphabet, seq, mo.config(err));
    if (!out_path.empty()) save_model(res.model, out_path);

    if (g.json) {
        nlohmann::ordered_json j;
        j["rules"] = rules_to_json(alphabet, res.model.proper_rules());
        j["model_bits"] = res.report.model_bits;
        j["data_bits"] = res.report.data_bits;
        j["total_bits"] = res.report.total();
        j["closed_patterns"] = res.stats.closed_patterns;
        j["generated_candidates"] = res.stats.generated_candidates;
        j["positive_candidates"] = res.stats.positive_candidates;
        if (out_path.empty()) j["model"] = model_to_json(res.model);
        out << j.dump(2) << "\n";
        return kOk;
    }
    if (out_path.empty()) {
        out << model_to_string(res.model);
        return kOk;
    }
    out << "sequence length   " << seq.size() << "\n"
        << "alphabet size     " << alphabet.size() << "\n"
        << "closed patterns   " << res.stats.closed_patterns << "\n"
        << "candidate rules   " << res.stats.generated_candidates << " (" << res.stats.positive_candidates
        << " with positive gain)\n"
        << "selected rules    " << res.model.proper_rule_count() << "\n";
    for (std::size_t i = res.model.alphabet_size(); i < res.model.size(); ++i)
        out << "  " << to_string(alphabet, res.model.rules()[i]) << "  w="
            << format_weight(res.model.weight(i), res.model.precision()) << "\n";
    out << std::fixed << std::setprecision(3) << "model_bits        " << res.report.model_bits << "\n"
        << "data_bits         " << res.report.data_bits << "\n"
        << "total_bits        " << res.report.total() << "\n";
    return kOk;
}

inline int cmd_score(const std::string& model_path, const std::string& seq_path, bool char_mode,
                     const GlobalOptions& g, std::ostream& out) {
    const Model m = load_model(model_path);
    const Sequence seq = Sequence::from_tokens(m.alphabet(), read_tokens(seq_path, char_mode));
    if (seq.empty()) throw Error("empty input: '" + seq_path + "' has no symbols");
    const DLReport dl = total_dl(m, seq);
    if (g.json) {
        nlohmann::ordered_json j{{"model_bits", dl.model_bits}, {"data_bits", dl.data_bits}, {"total_bits", dl.total()}};
        out << j.dump(2) << "\n";
    } else {
        out << std::fixed << std::setprecision(6) << "model_bits=" << dl.model_bits << "\n"
            << "data_bits=" << dl.data_bits << "\n"
            << "total=" << dl.total() << "\n";
    }
    return kOk;
}

inline int cmd_predict(const std::string& model_path, const std::string& test_path, const std::string& train_path,
                       const std::string& tau_grid, const std::string& out_path, bool char_mode,
                       const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    const Model m = load_model(model_path);
    const Sequence test = Sequence::from_tokens(m.alphabet(), read_tokens(test_path, char_mode));
    if (test.empty()) throw Error("empty input: '" + test_path + "' has no symbols");
    const std::vector<double> taus = tau_grid.empty() ? default_tau_grid() : parse_doubles(tau_grid);
    for (double t : taus)
        if (t < 0.0 || t > 1.0) throw CLI::ValidationError("--tau-grid", "thresholds must lie in [0,1]");

    std::vector<std::pair<std::string, PredictionOutcome>> results;
    results.emplace_back("cossu", evaluate_prediction(m, test, taus));
    if (!train_path.empty()) {
        const Sequence train = Sequence::from_tokens(m.alphabet(), read_tokens(train_path, char_mode));
        results.emplace_back("bigram", evaluate_prediction(bigram_baseline(train, m.alphabet_size()), test, taus));
    }
    results.emplace_back("uniform", evaluate_prediction(uniform_random_baseline(m.alphabet_size(), g.seed), test, taus));

    std::ostringstream table;
    if (g.json) {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& [method, res] : results) {
            nlohmann::ordered_json pts = nlohmann::ordered_json::array();
            for (const auto& p : res.points)
                pts.push_back({{"tau", p.tau}, {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1},
                               {"tpr", p.tpr}, {"fpr", p.fpr}});
            j.push_back({{"method", method}, {"auc", res.auc}, {"points", pts}});
        }
        table << j.dump(2) << "\n";
    } else {
        table << "method,tau,predicted,correct,total,precision,recall,f1,tpr,fpr\n";
        table << std::setprecision(6);
        for (const auto& [method, res] : results)
            for (const auto& p : res.points)
                table << method << ',' << p.tau << ',' << p.predicted << ',' << p.correct << ',' << p.total << ','
                      << p.precision << ',' << p.recall << ',' << p.f1 << ',' << p.tpr << ',' << p.fpr << "\n";
        for (const auto& [method, res] : results) err << "method=" << method << " auc=" << res.auc << "\n";
    }
    if (out_path.empty())
        out << table.str();
    else
        write_text(out_path, table.str());
    return kOk;
}

inline int cmd_classify(const std::vector<std::string>& train_specs, const std::string& test_dir, bool char_mode,
                        const MiningOptions& mo, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    std::map<std::string, std::vector<std::vector<std::string>>> train_tokens;
    for (const auto& spec : train_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
            throw CLI::ValidationError("--train", "expected label=file, got '" + spec + "'");
        train_tokens[spec.substr(0, eq)].push_back(read_tokens(spec.substr(eq + 1), char_mode));
    }
    if (train_tokens.size() < 2) throw CLI::ValidationError("--train", "needs at least two classes");

    struct Instance {
        std::string name;
        std::string truth;
        std::vector<std::string> tokens;
    };
    std::vector<Instance> instances;
    if (!fs::is_directory(test_dir)) throw Error("test directory '" + test_dir + "' does not exist");
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(test_dir)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());
    for (const auto& p : entries) {
        if (fs::is_directory(p)) {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file()) files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files)
                instances.push_back({p.filename().string() + "/" + f.filename().string(), p.filename().string(),
                                     read_tokens(f.string(), char_mode)});
        } else if (fs::is_regular_file(p)) {
            instances.push_back({p.filename().string(), "", read_tokens(p.string(), char_mode)});
        }
    }

    std::vector<std::string> all;
    for (const auto& [label, seqs] : train_tokens)
        for (const auto& toks : seqs) all.insert(all.end(), toks.begin(), toks.end());
    for (const auto& inst : instances) all.insert(all.end(), inst.tokens.begin(), inst.tokens.end());
    const Alphabet shared = Alphabet::from_tokens(all);

    std::map<std::string, Sequence> training;
    for (const auto& [label, seqs] : train_tokens) {
        std::vector<std::string> concat;
        for (const auto& toks : seqs) concat.insert(concat.end(), toks.begin(), toks.end());
        if (concat.empty()) throw Error("empty input: class '" + label + "' has no training symbols");
        training.emplace(label, Sequence::from_tokens(shared, concat));
    }
    const ClassifierModel cm = train_classifier(shared, training, mo.config(err), g.threads);

    std::size_t labelled = 0, correct = 0;
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    if (!g.json) out << "instance,predicted,truth\n";
    for (const auto& inst : instances) {
        const std::string pred = inst.tokens.empty() ? cm.classes.begin()->first
                                                     : classify(cm, Sequence::from_tokens(shared, inst.tokens));
        if (!inst.truth.empty()) {
            ++labelled;
            correct += pred == inst.truth ? 1 : 0;
        }
        if (g.json)
            j.push_back({{"instance", inst.name}, {"predicted", pred}, {"truth", inst.truth}});
        else
            out << csv_quote(inst.name) << ',' << pred << ',' << inst.truth << "\n";
    }
    const double accuracy = labelled ? static_cast<double>(correct) / static_cast<double>(labelled) : 0.0;
    if (g.json) {
        nlohmann::ordered_json summary{{"instances", j}};
        if (labelled) summary["accuracy"] = accuracy;
        out << summary.dump(2) << "\n";
    } else if (labelled) {
        out << "accuracy=" << accuracy << "\n";
    }
    return kOk;
}

inline int cmd_synth(const SynthOptions& so, const std::string& out_path, const std::string& targets_path,
                     const GlobalOptions& g, std::ostream& out) {
    const SyntheticSpec spec = make_spec(so, g.seed);
    const Sequence seq = synth_generate(spec);
    const std::string text = to_text(spec.alphabet, seq) + "\n";
    if (out_path.empty())
        out << text;
    else
        write_text(out_path, text);
    if (!targets_path.empty()) {
        nlohmann::ordered_json j{{"rules", rules_to_json(spec.alphabet, spec.targets)}};
        write_text(targets_path, j.dump(2) + "\n");
    }
    return kOk;
}

inline int cmd_eval_hitrate(const SynthOptions& so, std::size_t runs, const std::string& out_path,
                            const MiningOptions& mo, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    std::vector<SyntheticSpec> specs;
    for (std::size_t r = 0; r < runs; ++r) specs.push_back(make_spec(so, g.seed + r));
    std::vector<std::vector<Rule>> mined(runs);
    MiningOptions quiet = mo;
    quiet.trace = false;
    const MiningConfig cfg = quiet.config(err);
    parallel_for(runs, g.threads, [&](std::size_t r) {
        mined[r] = cossu_mine(specs[r].alphabet, synth_generate(specs[r]), cfg).proper_rules();
    });
    const Alphabet& a = specs.front().alphabet;
    const double rate = hit_rate(mined, specs.front().targets);

    std::ostringstream table;
    if (g.json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < runs; ++r)
            arr.push_back({{"seed", specs[r].seed}, {"rules", rules_to_json(a, mined[r])},
                           {"hit", same_rule_set(mined[r], specs[r].targets)}});
        table << nlohmann::ordered_json{{"runs", arr}, {"hit_rate", rate}}.dump(2) << "\n";
    } else {
        table << "seed,mined_rules,hit\n";
        for (std::size_t r = 0; r < runs; ++r)
            table << specs[r].seed << ',' << csv_quote(join_rules(a, mined[r])) << ','
                  << (same_rule_set(mined[r], specs[r].targets) ? 1 : 0) << "\n";
        err << "hit_rate=" << rate << "\n";
    }
    if (out_path.empty())
        out << table.str();
    else
        write_text(out_path, table.str());
    return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Compact sets of sequential rules mined by description length"};
    app.name("cossu");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--threads", g.threads, "Worker threads for multi-run harnesses (0 = all cores)");
    app.add_flag("--json", g.json, "Machine-readable output");

    bool char_mode = false;
    auto add_char_mode = [&](CLI::App* sub) {
        sub->add_flag("--char-mode", char_mode, "Treat every non-whitespace character as a symbol");
    };

    MiningOptions mo;
    SynthOptions so;

    std::string seq_path, out_path, model_path, test_path, train_path, tau_grid, targets_path, test_dir;
    std::vector<std::string> train_specs;
    std::size_t runs = 20;

    auto* mine = app.add_subcommand("mine", "Mine a rule table from a sequence file");
    mine->add_option("sequence", seq_path, "Sequence file")->required();
    mine->add_option("--out", out_path, "Model JSON output path (stdout when omitted)");
    add_mining_options(mine, mo);
    add_char_mode(mine);

    auto* score = app.add_subcommand("score", "Description length of a sequence under a model");
    score->add_option("--model", model_path, "Model JSON")->required();
    score->add_option("--seq", seq_path, "Sequence file")->required();
    add_char_mode(score);

    auto* predict = app.add_subcommand("predict", "Next-element prediction metrics per threshold (CSV)");
    predict->add_option("--model", model_path, "Model JSON")->required();
    predict->add_option("--test", test_path, "Test sequence file")->required();
    predict->add_option("--train", train_path, "Training sequence for the bigram baseline");
    predict->add_option("--tau-grid", tau_grid, "Comma-separated thresholds (default 0,0.05,...,0.95)");
    predict->add_option("--out", out_path, "CSV output path (stdout when omitted)");
    add_char_mode(predict);

    auto* classify_cmd = app.add_subcommand("classify", "Label sequences by the class model that compresses best");
    classify_cmd->add_option("--train", train_specs, "label=file pairs (repeat or comma-separate)")
        ->delimiter(',')
        ->required();
    classify_cmd->add_option("--test", test_dir, "Directory of test files; sub-directories name the true label")
        ->required();
    add_mining_options(classify_cmd, mo);
    add_char_mode(classify_cmd);

    auto* synth = app.add_subcommand("synth", "Generate a random sequence with planted rules");
    add_synth_options(synth, so);
    synth->add_option("--out", out_path, "Sequence output path (stdout when omitted)");
    synth->add_option("--targets", targets_path, "Write the planted rules as JSON");

    auto* hitrate = app.add_subcommand("eval-hitrate", "Hit rate of planted-rule recovery over seeds (CSV)");
    add_synth_options(hitrate, so);
    add_mining_options(hitrate, mo);
    hitrate->add_option("--runs", runs, "Number of seeds")->check(CLI::PositiveNumber);
    hitrate->add_option("--out", out_path, "CSV output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const CLI::App* failing = &app;
        for (auto* sub : app.get_subcommands()) failing = sub;
        err << failing->help();
        return kUsage;
    }

    try {
        if (*mine) return cmd_mine(seq_path, out_path, char_mode, mo, g, out, err);
        if (*score) return cmd_score(model_path, seq_path, char_mode, g, out);
        if (*predict) return cmd_predict(model_path, test_path, train_path, tau_grid, out_path, char_mode, g, out, err);
        if (*classify_cmd) return cmd_classify(train_specs, test_dir, char_mode, mo, g, out, err);
        if (*synth) return cmd_synth(so, out_path, targets_path, g, out);
        if (*hitrate) return cmd_eval_hitrate(so, runs, out_path, mo, g, out, err);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kUsage;
}

} // namespace cossu::cli

#endif // COSSU_CLI_HPP
