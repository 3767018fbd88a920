#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "momgraph.hpp"

namespace momgraph::cli {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

struct Globals {
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::uint64_t budget = kDefaultPathBudget;
};

// Records what produced an output file; written next to it as
// <out>.manifest.json, and referenced from the output itself.
class Manifest {
public:
    Manifest(std::string command, const Globals& g) : start_(std::chrono::steady_clock::now()) {
        doc_ = {{"schema", "momgraph.manifest/1"},
                {"command", std::move(command)},
                {"tool_version", kVersion},
                {"parameters", json::object()},
                {"seeds", json::array({g.seed})},
                {"inputs", json::array()},
                {"outputs", json::array()}};
        doc_["parameters"]["threads"] = g.threads;
        doc_["parameters"]["budget"] = g.budget;
        const auto now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        doc_["started_at"] = buf;
    }

    template <typename T>
    void param(const std::string& k, const T& v) {
        doc_["parameters"][k] = v;
    }
    void input(const std::string& p) { doc_["inputs"].push_back(p); }
    void output(const std::string& p) { doc_["outputs"].push_back(p); }

    static std::string path_for(const std::string& out) { return out + ".manifest.json"; }

    json finish() {
        doc_["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return doc_;
    }

    void write(const std::string& out) {
        std::ofstream f(path_for(out));
        f << finish().dump(2) << "\n";
    }

private:
    json doc_;
    std::chrono::steady_clock::time_point start_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline Graph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return load_edge_list(in);
}

inline std::variant<BlockModel, Graphon> read_model(const std::string& path) {
    const json j = read_json(path);
    if (!j.is_object()) throw InvalidModelError("model document must be a JSON object");
    if (j.contains("grid")) return graphon_from_json(j);
    return block_model_from_json(j);
}

// Writes a JSON document to `out` (with a manifest sidecar) or to stdout
// with the manifest embedded.
inline void emit_json(json doc, const std::string& out, Manifest& man, std::ostream& os) {
    if (out.empty()) {
        doc["manifest"] = man.finish();
        os << doc.dump(2) << "\n";
        return;
    }
    man.output(out);
    doc["manifest"] = Manifest::path_for(out);
    std::ofstream f(out);
    if (!f) throw InputError("cannot write '" + out + "'");
    f << doc.dump(2) << "\n";
    man.write(out);
}

inline json vec_json(const VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline json quantile_summary(const std::vector<double>& x) {
    json q = json::object();
    for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        std::ostringstream k;
        k << p;
        q[k.str()] = stats::quantile(x, p);
    }
    return q;
}

inline WheelSpec parse_wheel(const std::string& text) {
    auto pat = parse_pattern(text.rfind("wheel:", 0) == 0 ? text : "wheel:" + text);
    if (const auto* w = std::get_if<WheelSpec>(&pat)) return *w;
    throw ParseError("'" + text + "' is not a wheel key");
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    std::string model, out, latents;
    std::size_t n = 0;
    std::optional<double> rho;
    bool keep_latents = false;
};

inline int cmd_gen(const GenArgs& a, const Globals& g, std::ostream& os) {
    Manifest man("gen", g);
    man.input(a.model);
    man.param("n", a.n);
    const auto model = read_model(a.model);
    SampleOutput s;
    if (const auto* bm = std::get_if<BlockModel>(&model)) {
        BlockModel m = *bm;
        if (a.rho) {
            m.rho = *a.rho;
            m.validate();
        }
        man.param("rho", m.rho);
        s = sample_block_model(m, a.n, g.seed, a.keep_latents);
    } else {
        if (!a.rho) throw InvalidModelError("model field 'rho': graphon models need --rho");
        man.param("rho", *a.rho);
        s = sample_graphon(std::get<Graphon>(model), *a.rho, a.n, g.seed, a.keep_latents);
    }
    std::ostringstream body;
    if (!a.out.empty()) body << "# manifest: " << Manifest::path_for(a.out) << "\n";
    write_edge_list(s.graph, body);
    if (a.out.empty()) {
        os << body.str();
    } else {
        std::ofstream f(a.out);
        if (!f) throw InputError("cannot write '" + a.out + "'");
        f << body.str();
        man.output(a.out);
    }
    if (a.keep_latents) {
        const std::string lat = !a.latents.empty() ? a.latents : (a.out.empty() ? std::string("latents.txt") : a.out + ".latents");
        std::ofstream f(lat);
        if (!a.out.empty()) f << "# manifest: " << Manifest::path_for(a.out) << "\n";
        f << std::setprecision(17);
        for (double x : *s.xi) f << x << "\n";
        man.output(lat);
    }
    if (!a.out.empty()) man.write(a.out);
    return 0;
}

// ---------------------------------------------------------------- moments

struct MomentsArgs {
    std::string graph, out, estimator = "pcheck", approx, mode;
    std::vector<std::string> patterns;
};

inline int cmd_moments(const MomentsArgs& a, const Globals& g, std::ostream& os) {
    Manifest man("moments", g);
    man.input(a.graph);
    man.param("estimator", a.estimator);
    man.param("approx", a.approx);
    const Graph graph = read_graph(a.graph);
    std::vector<Pattern> pats;
    const auto names = a.patterns.empty() ? std::vector<std::string>{"edge", "2-star", "triangle", "wheel:k=2,l=1"} : a.patterns;
    for (const auto& p : names) pats.push_back(parse_pattern(p));
    man.param("patterns", names);
    MomentOptions opt;
    opt.limits = {g.budget, g.threads};
    opt.degree_approx = a.approx == "degree";
    if (!a.approx.empty() && a.approx != "degree") throw InputError("--approx accepts only 'degree'");
    if (a.estimator != "pcheck" && a.estimator != "qcheck") throw InputError("--estimator must be pcheck or qcheck");
    if (a.mode.empty()) {
        opt.mode = a.estimator == "pcheck" ? CountMode::both : CountMode::noninduced;
    } else if (a.mode == "induced") {
        opt.mode = CountMode::induced;
    } else if (a.mode == "noninduced") {
        opt.mode = CountMode::noninduced;
    } else if (a.mode == "both") {
        opt.mode = CountMode::both;
    } else {
        throw InputError("--mode must be induced, noninduced or both");
    }
    const auto table = moment_table(graph, pats, opt);
    json doc = to_json(table);
    doc["schema"] = "momgraph.moment_table/1";
    doc["estimator"] = a.estimator;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& e = table.entries[i];
        const auto& v = (a.estimator == "pcheck" && !e.degree_approx) ? e.p_check : e.q_check;
        doc["entries"][i]["estimate"] = v ? json(*v) : json(nullptr);
    }
    emit_json(std::move(doc), a.out, man, os);
    return 0;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string graph, out, weights = "none", estimator = "qcheck";
    int K = 2;
    bool report_stages = false;
    std::size_t boot_B = 200, boot_m = 0;
    int multistarts = 8;
    double stage_tolerance = 1e-2;
};

inline int cmd_fit(const FitArgs& a, const Globals& g, std::ostream& os) {
    Manifest man("fit", g);
    man.input(a.graph);
    man.param("K", a.K);
    man.param("weights", a.weights);
    man.param("estimator", a.estimator);
    const Graph graph = read_graph(a.graph);
    FitConfig cfg;
    cfg.K = a.K;
    cfg.seed = g.seed;
    cfg.multistarts = a.multistarts;
    cfg.stage_tolerance = a.stage_tolerance;
    cfg.limits = {g.budget, g.threads};
    if (a.estimator == "pcheck") {
        cfg.estimator = Estimator::pcheck;
    } else if (a.estimator != "qcheck") {
        throw InputError("--estimator must be pcheck or qcheck");
    }
    if (a.weights == "bootstrap") {
        const std::size_t m = a.boot_m ? a.boot_m : default_subsample_size(graph.num_vertices());
        man.param("bootstrap_m", m);
        man.param("bootstrap_B", a.boot_B);
        cfg.weights = bootstrap_weights(graph, cfg.fit_keys(), m, a.boot_B, g.seed, cfg.limits);
    } else if (a.weights != "none") {
        throw InputError("--weights must be none or bootstrap");
    }
    const auto res = fit_block_model(graph, cfg);
    json doc = to_json(res, a.report_stages);
    doc["schema"] = "momgraph.fit_result/1";
    if (!cfg.weights.empty()) doc["diagnostics"]["weights"] = cfg.weights;
    emit_json(std::move(doc), a.out, man, os);
    return 0;
}

// ---------------------------------------------------------------- degrees

struct DegreesArgs {
    std::string graph, out, csv;
    int m = 2;
};

inline int cmd_degrees(const DegreesArgs& a, const Globals& g, std::ostream& os) {
    Manifest man("degrees", g);
    man.input(a.graph);
    man.param("m", a.m);
    const Graph graph = read_graph(a.graph);
    const auto prof = m_degrees(graph, a.m, g.budget, g.threads);
    if (!a.csv.empty()) {
        std::ofstream f(a.csv);
        if (!f) throw InputError("cannot write '" + a.csv + "'");
        if (!a.out.empty()) f << "# manifest: " << Manifest::path_for(a.out) << "\n";
        f << "vertex";
        for (int j = 1; j <= a.m; ++j) f << ",D" << j;
        f << "\n";
        for (std::size_t i = 0; i < prof.n; ++i) {
            f << graph.label(static_cast<Vertex>(i));
            for (int j = 1; j <= a.m; ++j) f << "," << prof.count(i, j);
            f << "\n";
        }
        man.output(a.csv);
    }
    json cols = json::array();
    for (int j = 1; j <= a.m; ++j) {
        std::vector<double> x(prof.n);
        for (std::size_t i = 0; i < prof.n; ++i) x[i] = prof.mean_degree > 0 ? prof.normalized(i, j) : 0.0;
        json c = {{"m", j}, {"mean", x.empty() ? 0.0 : stats::mean(x)}};
        c["quantiles"] = x.empty() ? json::object() : quantile_summary(x);
        cols.push_back(c);
    }
    json doc = {{"schema", "momgraph.degree_summary/1"},
                {"n", prof.n},
                {"m", a.m},
                {"mean_degree", prof.mean_degree},
                {"csv", a.csv.empty() ? json(nullptr) : json(a.csv)},
                {"normalized_columns", cols}};
    emit_json(std::move(doc), a.out, man, os);
    return 0;
}

// ---------------------------------------------------------------- bootstrap

struct BootstrapArgs {
    std::string graph, out, key = "k=2,l=1";
    std::size_t m = 0, B = 500;
    bool literal = false;
};

inline int cmd_bootstrap(const BootstrapArgs& a, const Globals& g, std::ostream& os) {
    Manifest man("bootstrap", g);
    man.input(a.graph);
    const Graph graph = read_graph(a.graph);
    const WheelSpec key = parse_wheel(a.key);
    const std::size_t m = a.m ? a.m : default_subsample_size(graph.num_vertices());
    man.param("key", pattern_name(key));
    man.param("m", m);
    man.param("B", a.B);
    man.param("normalization", a.literal ? "literal" : "rho");
    const auto cache = HubCountCache::build(graph, {key}, {g.budget, g.threads});
    const auto res = bootstrap_variance(graph, cache, key, m, a.B, g.seed, a.literal ? BootstrapNorm::literal : BootstrapNorm::rho, g.threads);
    json doc = to_json(res);
    doc["schema"] = "momgraph.bootstrap_result/1";
    emit_json(std::move(doc), a.out, man, os);
    return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string config, out, summary;
};

struct SweepModel {
    std::string name;
    BlockModel model;
};

struct SweepCell {
    std::size_t id;
    std::size_t model;
    std::size_t n;
    double lambda;
};

inline std::vector<double> sweep_lambdas(const json& rule, std::size_t n) {
    if (rule.contains("values")) return rule.at("values").get<std::vector<double>>();
    if (rule.contains("power")) {
        const auto& p = rule.at("power");
        return {p.at("c").get<double>() * std::pow(static_cast<double>(n), p.at("exponent").get<double>())};
    }
    throw InputError("sweep field 'lambda': needs 'values' or 'power'");
}

inline json sweep_replicate(const SweepModel& sm, const SweepCell& cell, const json& metrics, int fitK, std::uint64_t seed,
                            const Globals& g) {
    BlockModel m = sm.model;
    m.rho = cell.lambda / static_cast<double>(cell.n - 1);
    m.validate();
    bool need_latents = false;
    for (const auto& mt : metrics) need_latents |= mt.get<std::string>().rfind("coupling", 0) == 0;
    const auto s = sample_block_model(m, cell.n, seed, need_latents);
    json out = json::object();
    for (const auto& mt : metrics) {
        const auto name = mt.get<std::string>();
        try {
            if (name == "rho_hat") {
                out[name] = rho_hat(s.graph);
            } else if (name == "rho_z") {
                out[name] = std::sqrt(static_cast<double>(cell.n)) * (rho_hat(s.graph) / m.rho - 1.0);
            } else if (name.rfind("tau:", 0) == 0) {
                const auto pat = parse_pattern(name.substr(4));
                MomentOptions opt;
                opt.mode = CountMode::noninduced;
                opt.limits = {g.budget, 1};
                const auto t = moment_table(s.graph, {pat}, opt);
                json v = {{"value", *t.entries[0].q_check}};
                if (const auto* w = std::get_if<WheelSpec>(&pat)) v["truth"] = tau_block(m, *w);
                out[name] = v;
            } else if (name.rfind("coupling:m=", 0) == 0) {
                const int mm = std::stoi(name.substr(11));
                const auto prof = m_degrees(s.graph, mm, g.budget, 1);
                out[name] = joint_coupling_error(prof, theta_profile(m, *s.xi, mm));
            } else if (name == "fit") {
                FitConfig cfg;
                cfg.K = fitK;
                cfg.seed = seed;
                cfg.limits = {g.budget, 1};
                const auto f = fit_block_model(s.graph, cfg);
                const BlockModel truth = canonicalize(m);
                json v = {{"pi", vec_json(f.pi)}, {"converged", f.converged}};
                if (truth.K() == fitK) {
                    v["pi_error"] = (f.pi - truth.pi).cwiseAbs().maxCoeff();
                    v["S_error"] = (f.S - truth.S).cwiseAbs().maxCoeff();
                }
                out[name] = v;
            } else {
                throw InputError("sweep field 'metrics': unknown metric '" + name + "'");
            }
        } catch (const Error& e) {
            if (dynamic_cast<const InputError*>(&e)) throw;
            out[name] = {{"error", e.what()}};
        }
    }
    return out;
}

inline int cmd_sweep(const SweepArgs& a, const Globals& g, std::ostream& os) {
    Manifest man("sweep", g);
    man.input(a.config);
    const json cfg = read_json(a.config);
    std::vector<SweepModel> models;
    for (const auto& mj : cfg.at("models")) {
        SweepModel sm;
        sm.name = mj.value("name", "model" + std::to_string(models.size()));
        if (mj.contains("file")) {
            // relative model paths are resolved against the config's directory
            std::filesystem::path f = mj.at("file").get<std::string>();
            if (f.is_relative()) f = std::filesystem::path(a.config).parent_path() / f;
            const auto loaded = read_model(f.string());
            if (!std::holds_alternative<BlockModel>(loaded)) throw InputError("sweep models must be block models");
            sm.model = std::get<BlockModel>(loaded);
        } else {
            sm.model = block_model_from_json(mj.at("model"));
        }
        models.push_back(sm);
    }
    const auto ns = cfg.at("n").get<std::vector<std::size_t>>();
    const int reps = cfg.value("replicates", 1);
    const std::uint64_t seed = cfg.value("seed", g.seed);
    const json metrics = cfg.value("metrics", json::array({"rho_hat"}));
    const int fitK = cfg.value("K", 2);
    man.param("config", cfg);

    std::vector<SweepCell> cells;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        for (std::size_t n : ns) {
            for (double lam : sweep_lambdas(cfg.at("lambda"), n)) cells.push_back({cells.size(), mi, n, lam});
        }
    }
    const std::size_t jobs = cells.size() * static_cast<std::size_t>(reps);
    std::vector<json> lines(jobs);
    parallel_for(jobs, g.threads, [&](std::size_t j) {
        const auto& cell = cells[j / static_cast<std::size_t>(reps)];
        const auto rep = j % static_cast<std::size_t>(reps);
        const std::uint64_t s = SplitMix64::derive(seed, {cell.id, rep});
        json line = {{"schema", "momgraph.sweep_line/1"},
                     {"cell", cell.id},
                     {"model", models[cell.model].name},
                     {"n", cell.n},
                     {"lambda", cell.lambda},
                     {"rep", rep},
                     {"seed", s}};
        try {
            line["metrics"] = sweep_replicate(models[cell.model], cell, metrics, fitK, s, g);
        } catch (const std::exception& e) {
            line["error"] = e.what();
        }
        lines[j] = std::move(line);
    });

    std::ostringstream body;
    for (auto& l : lines) {
        if (!a.out.empty()) l["manifest"] = Manifest::path_for(a.out);
        body << l.dump() << "\n";
    }
    if (a.out.empty()) {
        os << body.str();
    } else {
        std::ofstream f(a.out);
        if (!f) throw InputError("cannot write '" + a.out + "'");
        f << body.str();
        man.output(a.out);
    }

    if (!a.summary.empty()) {
        // per cell: mean/sd of scalar metrics, RMSE against truth for moments
        json cells_json = json::array();
        std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> rmse_by_n;
        for (const auto& cell : cells) {
            std::map<std::string, std::vector<double>> vals, errs;
            std::size_t failures = 0;
            for (int r = 0; r < reps; ++r) {
                const auto& l = lines[cell.id * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)];
                if (l.contains("error")) {
                    ++failures;
                    continue;
                }
                for (auto& [k, v] : l.at("metrics").items()) {
                    if (v.is_number()) {
                        vals[k].push_back(v.get<double>());
                    } else if (v.contains("value")) {
                        vals[k].push_back(v.at("value").get<double>());
                        if (v.contains("truth")) errs[k].push_back(v.at("value").get<double>() - v.at("truth").get<double>());
                    } else if (v.contains("pi_error")) {
                        vals[k + ".pi_error"].push_back(v.at("pi_error").get<double>());
                        vals[k + ".S_error"].push_back(v.at("S_error").get<double>());
                    }
                }
            }
            json cj = {{"cell", cell.id}, {"model", models[cell.model].name}, {"n", cell.n}, {"lambda", cell.lambda}, {"failures", failures}};
            json mj = json::object();
            for (auto& [k, x] : vals) {
                json s = {{"count", x.size()}, {"mean", stats::mean(x)}, {"median", stats::median(x)}};
                if (x.size() >= 2) s["sd"] = std::sqrt(stats::variance(x));
                if (errs.count(k)) {
                    double ss = 0.0;
                    for (double e : errs[k]) ss += e * e;
                    const double rmse = std::sqrt(ss / static_cast<double>(errs[k].size()));
                    s["rmse"] = rmse;
                    rmse_by_n[{models[cell.model].name, k}].emplace_back(static_cast<double>(cell.n), rmse);
                }
                mj[k] = s;
            }
            cj["metrics"] = mj;
            cells_json.push_back(cj);
        }
        json slopes = json::array();
        for (auto& [key, pts] : rmse_by_n) {
            if (pts.size() < 2) continue;
            std::vector<double> x, y;
            for (auto [n, r] : pts) {
                x.push_back(n);
                y.push_back(r);
            }
            slopes.push_back({{"model", key.first}, {"metric", key.second}, {"loglog_rmse_slope", stats::loglog_slope(x, y)}});
        }
        std::ofstream f(a.summary);
        f << json{{"schema", "momgraph.sweep_summary/1"}, {"cells", cells_json}, {"slopes", slopes}}.dump(2) << "\n";
        man.output(a.summary);
    }
    if (!a.out.empty()) man.write(a.out);
    return 0;
}

// ---------------------------------------------------------------- entry

inline int run(int argc, char** argv, std::ostream& os = std::cout, std::ostream& es = std::cerr) {
    CLI::App app{"Method-of-moments tools for exchangeable random graphs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    g.threads = default_threads();
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (default: MOMGRAPH_THREADS or hardware)");
    app.add_option("--budget", g.budget, "path budget per hub/vertex")->capture_default_str();

    GenArgs gen;
    auto* sg = app.add_subcommand("gen", "sample a graph from a block model or graphon");
    sg->add_option("model", gen.model, "model JSON")->required();
    sg->add_option("--n", gen.n, "vertex count")->required();
    sg->add_option("--out,-o", gen.out, "edge-list output (default stdout)");
    sg->add_option("--rho", gen.rho, "density scale (overrides the model's rho; required for graphons)");
    auto* lat = sg->add_flag("--latents", gen.keep_latents, "also write the latent positions");
    sg->add_option("--latents-out", gen.latents, "latent output path (default <out>.latents)")->needs(lat);

    MomentsArgs mom;
    auto* sm = app.add_subcommand("moments", "normalized pattern moments of a graph");
    sm->add_option("graph", mom.graph, "edge list")->required();
    sm->add_option("--pattern,-p", mom.patterns, "pattern: edge, 2-star, triangle, wheel:k=..,l=.., edges:0-1,..");
    sm->add_option("--estimator", mom.estimator, "pcheck or qcheck")->capture_default_str();
    sm->add_option("--approx", mom.approx, "'degree' for the falling-factorial approximation");
    sm->add_option("--mode", mom.mode, "induced, noninduced or both");
    sm->add_option("--out,-o", mom.out, "JSON output");

    FitArgs fit;
    auto* sf = app.add_subcommand("fit", "fit a K-block model from wheel moments");
    sf->add_option("graph", fit.graph, "edge list")->required();
    sf->add_option("--K,-K", fit.K, "block count")->capture_default_str();
    sf->add_option("--weights", fit.weights, "none or bootstrap")->capture_default_str();
    sf->add_option("--estimator", fit.estimator, "qcheck or pcheck")->capture_default_str();
    sf->add_flag("--report-stages", fit.report_stages, "include per-stage atoms");
    sf->add_option("--bootstrap-B", fit.boot_B)->capture_default_str();
    sf->add_option("--bootstrap-m", fit.boot_m, "default ceil(n^0.7)");
    sf->add_option("--multistarts", fit.multistarts)->capture_default_str();
    sf->add_option("--stage-tolerance", fit.stage_tolerance)->capture_default_str();
    sf->add_option("--out,-o", fit.out, "JSON output");

    DegreesArgs deg;
    auto* sd = app.add_subcommand("degrees", "m-degrees (loopless path counts)");
    sd->add_option("graph", deg.graph, "edge list")->required();
    sd->add_option("--m,-m", deg.m, "maximum path length")->capture_default_str();
    sd->add_option("--csv", deg.csv, "per-vertex CSV output");
    sd->add_option("--out,-o", deg.out, "summary JSON output");

    BootstrapArgs boot;
    auto* sb = app.add_subcommand("bootstrap", "vertex-subsampling variance of a wheel moment");
    sb->add_option("graph", boot.graph, "edge list")->required();
    sb->add_option("--key", boot.key, "wheel key, e.g. k=2,l=1")->capture_default_str();
    sb->add_option("--m,-m", boot.m, "subsample size (default ceil(n^0.7))");
    sb->add_option("--B,-B", boot.B, "replicates")->capture_default_str();
    sb->add_flag("--literal-norm", boot.literal, "normalize by (Dbar*/m) instead of Dbar*/(n-1)");
    sb->add_option("--out,-o", boot.out, "JSON output");

    SweepArgs sw;
    auto* ss = app.add_subcommand("sweep", "simulation sweep over models, n and lambda");
    ss->add_option("config", sw.config, "sweep config JSON")->required();
    ss->add_option("--out,-o", sw.out, "JSONL output (default stdout)");
    ss->add_option("--summary", sw.summary, "aggregated summary JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, os, es);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*sg) return cmd_gen(gen, g, os);
        if (*sm) return cmd_moments(mom, g, os);
        if (*sf) return cmd_fit(fit, g, os);
        if (*sd) return cmd_degrees(deg, g, os);
        if (*sb) return cmd_bootstrap(boot, g, os);
        if (*ss) return cmd_sweep(sw, g, os);
    } catch (const Error& e) {
        es << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const json::exception& e) {
        es << "error: malformed input: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace momgraph::cli
