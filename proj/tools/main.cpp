// kge: train, evaluate, and probe knowledge-graph embedding models.
//
// Exit codes: 0 success, 2 usage error, 3 checkpoint/dataset compatibility
// error, 4 name lookup error, 1 anything else.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kge/checkpoint.hpp"
#include "kge/dataset.hpp"
#include "kge/errors.hpp"
#include "kge/evaluation.hpp"
#include "kge/expressivity.hpp"
#include "kge/model.hpp"
#include "kge/rules.hpp"
#include "kge/training.hpp"

namespace {

using namespace kge;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCompat = 3;
constexpr int kExitLookup = 4;

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_names(const std::string& query, const std::vector<std::string>& names) {
    std::vector<std::pair<std::size_t, const std::string*>> scored;
    scored.reserve(names.size());
    for (const std::string& name : names) scored.push_back({edit_distance(query, name), &name});
    std::partial_sort(scored.begin(), scored.begin() + std::min<std::size_t>(3, scored.size()),
                      scored.end());
    std::string out;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, scored.size()); ++i) {
        if (i) out += ", ";
        out += *scored[i].second;
    }
    return out;
}

int lookup_entity(const Vocabulary& vocab, const std::string& name) {
    if (auto id = vocab.entity_id(name)) return *id;
    throw VocabError("unknown entity `" + name +
                     "`; nearest: " + nearest_names(name, vocab.entity_names()));
}

int lookup_relation(const Vocabulary& vocab, const std::string& name) {
    if (auto id = vocab.relation_id(name)) return *id;
    throw VocabError("unknown relation `" + name +
                     "`; nearest: " + nearest_names(name, vocab.relation_names()));
}

void check_compatible(const ModelParams& params, const Vocabulary& vocab) {
    if (params.num_entities() != vocab.num_entities() ||
        params.num_relations() != vocab.num_relations()) {
        throw CompatibilityError(
            "checkpoint was trained on " + std::to_string(params.num_entities()) + " entities / " +
            std::to_string(params.num_relations()) + " relations, dataset has " +
            std::to_string(vocab.num_entities()) + " / " + std::to_string(vocab.num_relations()));
    }
}

// Accept either a checkpoint directory or a training output directory that
// contains one.
std::string resolve_checkpoint(const std::string& dir) {
    if (std::filesystem::exists(dir + "/meta.json")) return dir;
    return dir + "/checkpoint";
}

TrainConfig config_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("unparseable config: " + std::string(e.what()));
    }
    TrainConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "learning_rate") cfg.learning_rate = value.get<double>();
        else if (key == "lambda") cfg.lambda = value.get<double>();
        else if (key == "batch_size") cfg.batch_size = value.get<int>();
        else if (key == "neg_ratio") cfg.neg_ratio = value.get<int>();
        else if (key == "max_epochs") cfg.max_epochs = value.get<int>();
        else if (key == "eval_every") cfg.eval_every = value.get<int>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "model_kind") cfg.model_kind = model_kind_from_string(value.get<std::string>());
        else if (key == "dim") cfg.dim = value.get<int>();
        else throw std::invalid_argument("unknown config field: " + key);
    }
    return cfg;
}

void write_config_json(const std::string& path, const TrainConfig& cfg) {
    nlohmann::json j;
    j["learning_rate"] = cfg.learning_rate;
    j["lambda"] = cfg.lambda;
    j["batch_size"] = cfg.batch_size;
    j["neg_ratio"] = cfg.neg_ratio;
    j["max_epochs"] = cfg.max_epochs;
    j["eval_every"] = cfg.eval_every;
    j["seed"] = cfg.seed;
    j["model_kind"] = to_string(cfg.model_kind);
    j["dim"] = cfg.dim;
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

int run_preprocess(const std::string& data_dir, const std::string& out_dir) {
    Dataset ds = load_dataset(data_dir);
    std::cout << "entities:             " << ds.vocab.num_entities() << '\n'
              << "relations:            " << ds.vocab.num_relations() << '\n'
              << "train triples:        " << ds.triples.train.size() << '\n'
              << "valid triples:        " << ds.triples.valid.size() << '\n'
              << "test triples:         " << ds.triples.test.size() << '\n'
              << "duplicates collapsed: " << ds.duplicates_collapsed << '\n'
              << "cross-split overlap:  " << ds.triples.split_overlap << '\n'
              << "filter index size:    " << ds.triples.filter.size() << '\n';
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        save_vocab(out_dir + "/entities.tsv", out_dir + "/relations.tsv", ds.vocab);
        std::cout << "vocabulary exported to " << out_dir << '\n';
    }
    return kExitOk;
}

struct TrainFlags {
    std::string data_dir;
    std::string out_dir;
    std::string config_path;
    std::string rules_path;
    std::string model = "simple";
    int dim = 200;
    double lr = 0.1;
    double lambda = 0.0;
    int neg = 1;
    int batch = 100;
    int epochs = 1000;
    int eval_every = 50;
    std::uint64_t seed = 0;
    int threads = 1;
};

int run_train(const TrainFlags& f, const CLI::App& sub) {
    // config file first, explicit flags on top, built-in defaults under both
    TrainConfig cfg;
    cfg.model_kind = model_kind_from_string(f.model);
    cfg.dim = f.dim;
    cfg.learning_rate = f.lr;
    cfg.lambda = f.lambda;
    cfg.neg_ratio = f.neg;
    cfg.batch_size = f.batch;
    cfg.max_epochs = f.epochs;
    cfg.eval_every = f.eval_every;
    cfg.seed = f.seed;
    if (!f.config_path.empty()) {
        TrainConfig from_file = config_from_json(f.config_path);
        cfg = from_file;
        if (sub.count("--model")) cfg.model_kind = model_kind_from_string(f.model);
        if (sub.count("--dim")) cfg.dim = f.dim;
        if (sub.count("--lr")) cfg.learning_rate = f.lr;
        if (sub.count("--lambda")) cfg.lambda = f.lambda;
        if (sub.count("--neg")) cfg.neg_ratio = f.neg;
        if (sub.count("--batch")) cfg.batch_size = f.batch;
        if (sub.count("--epochs")) cfg.max_epochs = f.epochs;
        if (sub.count("--eval-every")) cfg.eval_every = f.eval_every;
        if (sub.count("--seed")) cfg.seed = f.seed;
    }
    cfg.validate();

    Dataset ds = load_dataset(f.data_dir);
    TieSpec ties;
    if (!f.rules_path.empty()) {
        ties = ties_from_rules(parse_rules(f.rules_path), ds.vocab);
        std::cerr << "bound " << ties.size() << " parameter ties from " << f.rules_path << '\n';
    }

    TrainResult result = train(cfg, ds.triples, ties, f.threads);

    std::filesystem::create_directories(f.out_dir);
    save_params(result.params, f.out_dir + "/checkpoint");
    save_history(f.out_dir + "/history.csv", result.history);
    write_config_json(f.out_dir + "/config.json", cfg);
    save_vocab(f.out_dir + "/entities.tsv", f.out_dir + "/relations.tsv", ds.vocab);

    std::cout << "trained " << to_string(cfg.model_kind) << " d=" << cfg.dim << " for "
              << cfg.max_epochs << " epochs\n";
    if (result.best_epoch > 0) {
        std::cout.precision(17);
        std::cout << "best validation filtered MRR " << result.best_valid_mrr << " at epoch "
                  << result.best_epoch << '\n';
    }
    std::cout << "checkpoint written to " << f.out_dir << "/checkpoint\n";
    return kExitOk;
}

int run_evaluate(const std::string& data_dir, const std::string& ckpt_dir,
                 const std::string& split, const std::string& per_triple_path,
                 const std::string& json_path, int threads) {
    Dataset ds = load_dataset(data_dir);
    ModelParams params = load_params(resolve_checkpoint(ckpt_dir));
    check_compatible(params, ds.vocab);

    const std::vector<Triple>& eval_split =
        split == "valid" ? ds.triples.valid : ds.triples.test;
    if (eval_split.empty()) throw std::invalid_argument("split `" + split + "` is empty");

    EvalReport report = evaluate(params, eval_split, ds.triples.filter, threads);
    std::cerr << report_to_table(report);
    std::cout << report_to_json(report) << '\n';
    if (!per_triple_path.empty()) save_per_triple_csv(per_triple_path, report, ds.vocab);
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << report_to_json(report) << '\n';
    }
    return kExitOk;
}

int run_score(const std::string& data_dir, const std::string& ckpt_dir, const std::string& head,
              const std::string& relation, const std::string& tail,
              const std::string& kind_override) {
    Dataset ds = load_dataset(data_dir);
    ModelParams params = load_params(resolve_checkpoint(ckpt_dir));
    check_compatible(params, ds.vocab);
    if (!kind_override.empty() && model_kind_from_string(kind_override) != params.kind) {
        throw CompatibilityError("checkpoint holds a `" + to_string(params.kind) +
                                 "` model, not `" + kind_override + "`");
    }

    Triple t{lookup_entity(ds.vocab, head), lookup_relation(ds.vocab, relation),
             lookup_entity(ds.vocab, tail)};
    double phi = score(params, t);
    std::cout << "score " << phi << '\n' << "sigma(score) " << logistic(phi) << '\n';
    return kExitOk;
}

int run_oracle(const std::string& truth_path, const std::string& method) {
    GroundTruth gt = GroundTruth::load(truth_path);
    const long grid_dim = static_cast<long>(gt.num_entities()) * gt.num_relations();
    const long incr_dim = static_cast<long>(gt.gamma()) + 1;

    std::string chosen = method;
    if (method == "min") chosen = grid_dim <= incr_dim ? "grid" : "incremental";
    ModelParams params = chosen == "grid" ? construct_grid(gt) : construct_incremental(gt);
    VerifyResult result = verify(params, gt);

    std::cout << "entities " << gt.num_entities() << ", relations " << gt.num_relations()
              << ", true facts " << gt.gamma() << '\n'
              << "construction " << chosen << ", dimension " << params.dim << '\n'
              << "verification " << (result.pass ? "pass" : "fail") << " ("
              << result.violations.size() << " violations)\n";
    return result.pass ? kExitOk : kExitOther;
}

int run_dedupe(const std::string& train_path, const std::string& rules_path,
               const std::string& out_path, std::uint64_t seed) {
    Vocabulary vocab;
    LoadedSplit split = load_triples(train_path, vocab);
    std::vector<Rule> rules = parse_rules(rules_path);
    std::vector<Triple> kept = remove_redundant(split.triples, rules, vocab, seed);
    save_triples(out_path, kept, vocab);

    double pct = split.triples.empty()
                     ? 0.0
                     : 100.0 * (split.triples.size() - kept.size()) / split.triples.size();
    std::cout << "read " << split.triples.size() << " triples, kept " << kept.size() << " ("
              << pct << "% removed)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph embedding toolkit"};
    app.require_subcommand(1);

    auto* pre = app.add_subcommand("preprocess", "load a dataset, report stats, export vocab");
    std::string pre_data, pre_out;
    pre->add_option("--data", pre_data, "dataset directory (train/valid/test .txt)")->required();
    pre->add_option("--out", pre_out, "directory for vocabulary export");

    auto* tr = app.add_subcommand("train", "train a model and write a checkpoint");
    TrainFlags tf;
    tr->add_option("--data", tf.data_dir, "dataset directory")->required();
    tr->add_option("--out", tf.out_dir, "output directory")->required();
    tr->add_option("--config", tf.config_path, "JSON config file");
    tr->add_option("--rules", tf.rules_path, "background-rule file (parameter ties)");
    tr->add_option("--model", tf.model, "simple|simple-ignr|cp|distmult|complex")
        ->check(CLI::IsMember({"simple", "simple-ignr", "cp", "distmult", "complex"}));
    tr->add_option("--dim", tf.dim, "embedding size");
    tr->add_option("--lr", tf.lr, "learning rate");
    tr->add_option("--lambda", tf.lambda, "L2 coefficient");
    tr->add_option("--neg", tf.neg, "negatives per positive");
    tr->add_option("--batch", tf.batch, "positives per batch");
    tr->add_option("--epochs", tf.epochs, "max epochs");
    tr->add_option("--eval-every", tf.eval_every, "epochs between validation evals");
    tr->add_option("--seed", tf.seed, "run seed (init/shuffle/corruption substreams)");
    tr->add_option("--threads", tf.threads, "worker threads");

    auto* ev = app.add_subcommand("evaluate", "filtered/raw ranking metrics for a checkpoint");
    std::string ev_data, ev_ckpt, ev_split = "test", ev_csv, ev_json;
    int ev_threads = 1;
    ev->add_option("--data", ev_data, "dataset directory")->required();
    ev->add_option("--checkpoint", ev_ckpt, "checkpoint (or training output) directory")->required();
    ev->add_option("--split", ev_split, "test|valid")->check(CLI::IsMember({"test", "valid"}));
    ev->add_option("--per-triple", ev_csv, "write per-triple ranks CSV");
    ev->add_option("--json", ev_json, "also write the JSON report here");
    ev->add_option("--threads", ev_threads, "worker threads");

    auto* sc = app.add_subcommand("score", "score one (head, relation, tail) by name");
    std::string sc_data, sc_ckpt, sc_head, sc_rel, sc_tail, sc_kind;
    sc->add_option("--data", sc_data, "dataset directory")->required();
    sc->add_option("--checkpoint", sc_ckpt, "checkpoint directory")->required();
    sc->add_option("--head", sc_head, "head entity name")->required();
    sc->add_option("--relation", sc_rel, "relation name")->required();
    sc->add_option("--tail", sc_tail, "tail entity name")->required();
    sc->add_option("--model-kind", sc_kind, "fail unless the checkpoint holds this kind");

    auto* orc = app.add_subcommand("oracle", "build and verify an exact model for a ground truth");
    std::string orc_truth, orc_method = "min";
    orc->add_option("--truth", orc_truth, "ground-truth file (`|E| |R|` header, `h r t` rows)")
        ->required();
    orc->add_option("--method", orc_method, "grid|incremental|min")
        ->check(CLI::IsMember({"grid", "incremental", "min"}));

    auto* dd = app.add_subcommand("dedupe", "drop rule-redundant triples from a training file");
    std::string dd_train, dd_rules, dd_out;
    std::uint64_t dd_seed = 0;
    dd->add_option("--train", dd_train, "training TSV")->required();
    dd->add_option("--rules", dd_rules, "rule file")->required();
    dd->add_option("--out", dd_out, "output TSV")->required();
    dd->add_option("--seed", dd_seed, "seed choosing which pair member is kept");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*pre) return run_preprocess(pre_data, pre_out);
        if (*tr) return run_train(tf, *tr);
        if (*ev) return run_evaluate(ev_data, ev_ckpt, ev_split, ev_csv, ev_json, ev_threads);
        if (*sc) return run_score(sc_data, sc_ckpt, sc_head, sc_rel, sc_tail, sc_kind);
        if (*orc) return run_oracle(orc_truth, orc_method);
        if (*dd) return run_dedupe(dd_train, dd_rules, dd_out, dd_seed);
    } catch (const CompatibilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCompat;
    } catch (const VocabError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitLookup;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
    return kExitUsage;
}
