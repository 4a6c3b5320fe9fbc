#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "bqsos/dual_witness.hpp"
#include "bqsos/fixtures.hpp"
#include "bqsos/gram.hpp"
#include "bqsos/io_json.hpp"
#include "bqsos/m11_analysis.hpp"
#include "bqsos/psd_oracle.hpp"
#include "bqsos/rank_search.hpp"
#include "bqsos/transforms.hpp"

namespace bqsos {

/// Effective flag values for one run. Sentinels (0 / empty / negative where
/// noted) mean "use the subcommand default"; defaults are resolved inside
/// execute() so a stored config replays identically.
struct CliConfig {
    std::string subcommand;
    std::string input;         // JSON file, or empty when a fixture is used
    std::string fixture_name;  // choi | product | perfect-square | calderon-demo
    int fixture_m = 3, fixture_n = 3;
    std::string out;           // main artifact path; empty -> stdout
    std::string certificate;   // transform: certificate file to transport
    std::string direction;     // transform: f2h | h2f
    uint64_t seed = 2024;
    double tol = 0;            // 0 -> default for the subcommand
    int restarts = 0;          // 0 -> default
    int kmax = 0;              // 0 -> default
    long budget = 0;           // 0 -> default iteration budget
    int count = 200;           // survey
    bool exact = false;
    std::vector<double> at_x, at_y;  // eval point
    std::optional<double> at_z;
};

inline Json config_to_json(const CliConfig& c) {
    Json x = Json::array(), y = Json::array();
    for (double v : c.at_x) x.push_back(v);
    for (double v : c.at_y) y.push_back(v);
    return Json{{"input", c.input},
                {"fixture", c.fixture_name},
                {"m", c.fixture_m},
                {"n", c.fixture_n},
                {"certificate", c.certificate},
                {"direction", c.direction},
                {"seed", c.seed},
                {"tol", c.tol},
                {"restarts", c.restarts},
                {"kmax", c.kmax},
                {"budget", c.budget},
                {"count", c.count},
                {"exact", c.exact},
                {"x", std::move(x)},
                {"y", std::move(y)},
                {"z", c.at_z ? Json(*c.at_z) : Json(nullptr)}};
}

inline CliConfig config_from_json(const std::string& subcommand, const Json& j,
                                  const std::string& path = "$.parameters") {
    CliConfig c;
    c.subcommand = subcommand;
    c.input = detail::member(j, "input", path).get<std::string>();
    c.fixture_name = detail::member(j, "fixture", path).get<std::string>();
    c.fixture_m = detail::int_member(j, "m", path);
    c.fixture_n = detail::int_member(j, "n", path);
    c.certificate = detail::member(j, "certificate", path).get<std::string>();
    c.direction = detail::member(j, "direction", path).get<std::string>();
    c.seed = detail::member(j, "seed", path).get<uint64_t>();
    c.tol = detail::member(j, "tol", path).get<double>();
    c.restarts = detail::int_member(j, "restarts", path);
    c.kmax = detail::int_member(j, "kmax", path);
    c.budget = detail::member(j, "budget", path).get<long>();
    c.count = detail::int_member(j, "count", path);
    c.exact = detail::member(j, "exact", path).get<bool>();
    for (const auto& v : detail::member(j, "x", path)) c.at_x.push_back(v.get<double>());
    for (const auto& v : detail::member(j, "y", path)) c.at_y.push_back(v.get<double>());
    const Json& z = detail::member(j, "z", path);
    if (!z.is_null()) c.at_z = z.get<double>();
    return c;
}

/// Outcome of one run before anything touches the filesystem: labeled
/// artifacts plus the manifest describing them.
struct RunResult {
    int exit_code = 0;
    std::map<std::string, std::string> outputs;  // label -> bytes ("output" is primary)
    RunManifest manifest;
};

namespace cli_detail {

struct LoadedInput {
    Json doc;
    std::string digest;  // of the raw file bytes
};

inline LoadedInput load_json_file(const std::string& path) {
    const std::string bytes = read_file(path);
    try {
        return {Json::parse(bytes), sha256_hex(bytes)};
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

/// Resolves --input / --fixture into a form document (fixtures are emitted
/// through the same schema so every consumer sees identical JSON).
inline LoadedInput load_form_doc(const CliConfig& cfg, RunManifest& man) {
    if (!cfg.input.empty()) {
        LoadedInput in = load_json_file(cfg.input);
        man.input_digests["input"] = in.digest;
        return in;
    }
    if (!cfg.fixture_name.empty()) {
        Json doc = to_json(fixture(cfg.fixture_name, cfg.fixture_m, cfg.fixture_n));
        return {std::move(doc), ""};
    }
    throw InvalidInput(cfg.subcommand + ": needs --input or --fixture");
}

inline OracleOptions oracle_options(const CliConfig& cfg) {
    OracleOptions o;
    o.seed = cfg.seed;
    if (cfg.restarts > 0) o.restarts = cfg.restarts;
    if (cfg.budget > 0) o.iters = (int)cfg.budget;
    if (cfg.tol > 0) o.tol = cfg.tol;
    return o;
}

inline RankSearchOptions rank_options(const CliConfig& cfg) {
    RankSearchOptions r;
    if (cfg.restarts > 0) r.restarts = cfg.restarts;
    if (cfg.tol > 0) r.tol = cfg.tol;
    return r;
}

inline void reject_exact(const CliConfig& cfg) {
    if (cfg.exact)
        throw InvalidInput(cfg.subcommand + ": --exact is not supported here (rational arithmetic "
                                            "covers eval and transform)");
}

inline Json verdict_json(const PsdVerdict& v, bool psd) {
    Json argmin{{"x", v.x}, {"y", v.y}};
    if (v.z) argmin["z"] = *v.z;
    return Json{{"kind", "psd-verdict"},
                {"psd", psd},
                {"min_value", v.min_value},
                {"argmin", std::move(argmin)},
                {"budget_used", v.budget_used}};
}

// --- subcommand bodies -----------------------------------------------------

inline RunResult do_eval(const CliConfig& cfg, RunManifest& man) {
    LoadedInput in = load_form_doc(cfg, man);
    RunResult rr;
    auto run = [&]<class T>() {
        const std::string kind = detail::kind_of(in.doc, "$");
        T value;
        const Var yvar{VarBlock::Y, 0};
        if (kind == "biquadratic") {
            if (cfg.at_z) throw InvalidInput("eval: --z does not apply to a biquadratic form");
            auto f = biquadratic_from_json<T>(in.doc);
            std::vector<T> x, y;
            for (double v : cfg.at_x) x.push_back(scalar_traits<T>::from_double(v));
            for (double v : cfg.at_y) y.push_back(scalar_traits<T>::from_double(v));
            value = f.evaluate(x, y);
        } else if (kind == "tripartite") {
            if (!cfg.at_z) throw InvalidInput("eval: tripartite form needs --z");
            auto h = tripartite_from_json<T>(in.doc);
            std::vector<T> x, y;
            for (double v : cfg.at_x) x.push_back(scalar_traits<T>::from_double(v));
            for (double v : cfg.at_y) y.push_back(scalar_traits<T>::from_double(v));
            value = h.evaluate(x, y, scalar_traits<T>::from_double(*cfg.at_z));
        } else if (kind == "m11" || kind == "form211") {
            if (!cfg.at_z) throw InvalidInput("eval: this form needs --z");
            if (cfg.at_y.size() != 1) throw InvalidInput("eval: this form needs a single --y value");
            M11Form<T> h = kind == "m11" ? m11_from_json<T>(in.doc)
                                         : form211_from_json<T>(in.doc).m11();
            std::vector<T> x;
            for (double v : cfg.at_x) x.push_back(scalar_traits<T>::from_double(v));
            value = h.evaluate(x, scalar_traits<T>::from_double(cfg.at_y[0]),
                               scalar_traits<T>::from_double(*cfg.at_z));
        } else {
            throw InvalidInput("$.kind: unknown form kind '" + kind + "'");
        }
        rr.outputs["output"] = dump_json(Json{{"kind", "evaluation"}, {"value", scalar_to_json(value)}});
    };
    if (cfg.exact)
        run.template operator()<Rational>();
    else
        run.template operator()<double>();
    return rr;
}

inline RunResult do_transform(const CliConfig& cfg, RunManifest& man) {
    if (cfg.direction != "f2h" && cfg.direction != "h2f")
        throw InvalidInput("transform: --direction must be f2h or h2f");
    LoadedInput in = load_form_doc(cfg, man);
    std::optional<LoadedInput> cert_in;
    if (!cfg.certificate.empty()) {
        cert_in = load_json_file(cfg.certificate);
        man.input_digests["certificate"] = cert_in->digest;
    }
    RunResult rr;
    auto run = [&]<class T>() {
        if (cfg.direction == "f2h") {
            auto f = biquadratic_from_json<T>(in.doc);
            auto h = biquadratic_to_tripartite(f);
            rr.outputs["output"] = dump_json(to_json(h));
            if (cert_in) {
                auto c = certificate_from_json<T>(cert_in->doc);
                rr.outputs["certificate"] = dump_json(to_json(transport_certificate(c, f)));
            }
        } else {
            auto h = tripartite_from_json<T>(in.doc);
            auto f = tripartite_to_biquadratic(h);
            rr.outputs["output"] = dump_json(to_json(f));
            if (cert_in) {
                auto c = certificate_from_json<T>(cert_in->doc);
                rr.outputs["certificate"] = dump_json(to_json(transport_certificate(c, h)));
            }
        }
    };
    if (cfg.exact)
        run.template operator()<Rational>();
    else
        run.template operator()<double>();
    return rr;
}

inline RunResult do_check_psd(const CliConfig& cfg, RunManifest& man) {
    reject_exact(cfg);
    LoadedInput in = load_form_doc(cfg, man);
    const OracleOptions o = oracle_options(cfg);
    auto [ok, v] = std::visit([&](const auto& form) { return is_psd(form, o); },
                              form_from_json(in.doc));
    RunResult rr;
    rr.exit_code = ok ? 0 : 2;
    rr.outputs["output"] = dump_json(verdict_json(v, ok));
    return rr;
}

inline RunResult do_sos(const CliConfig& cfg, RunManifest& man) {
    reject_exact(cfg);
    LoadedInput in = load_form_doc(cfg, man);
    const double tol = cfg.tol > 0 ? cfg.tol : 1e-9;
    const long iters = cfg.budget > 0 ? cfg.budget : 50000;
    const FormVariant form = form_from_json(in.doc);
    const auto [poly, basis] = std::visit(
        [](const auto& f) { return std::make_pair(f.to_polynomial(), build_basis(f)); }, form);
    const FeasibilityResult res = sos_feasibility(poly, basis, tol, iters);
    RunResult rr;
    if (res.status == FeasibilityStatus::Feasible) {
        SosCertificate<double> cert = extract_certificate(res.G, basis);
        const auto rep = cert.verify(poly);
        rr.outputs["output"] = dump_json(Json{{"kind", "sos-result"},
                                              {"status", "feasible"},
                                              {"iterations", res.iters},
                                              {"affine_residual", res.affine_residual},
                                              {"certificate_residual", rep.max_abs},
                                              {"certificate", to_json(cert)}});
    } else {
        rr.exit_code = 4;
        rr.outputs["output"] = dump_json(Json{{"kind", "sos-result"},
                                              {"status", "indeterminate"},
                                              {"iterations", res.iters},
                                              {"affine_residual", res.affine_residual},
                                              {"psd_residual", res.psd_residual}});
    }
    return rr;
}

inline RunResult do_rank(const CliConfig& cfg, RunManifest& man) {
    reject_exact(cfg);
    LoadedInput in = load_form_doc(cfg, man);
    const FormVariant form = form_from_json(in.doc);
    const auto [poly, basis] = std::visit(
        [](const auto& f) { return std::make_pair(f.to_polynomial(), build_basis(f)); }, form);
    const int kmax = cfg.kmax > 0 ? std::min<int>(cfg.kmax, (int)basis.size()) : (int)basis.size();
    auto est = sos_rank_estimate(poly, basis, kmax, cfg.seed, rank_options(cfg));
    RunResult rr;
    if (est) {
        rr.outputs["output"] = dump_json(Json{{"kind", "rank-estimate"},
                                              {"estimate", est->first},
                                              {"kmax", kmax},
                                              {"certificate", to_json(est->second)}});
    } else {
        rr.exit_code = 4;
        rr.outputs["output"] =
            dump_json(Json{{"kind", "rank-estimate"}, {"estimate", nullptr}, {"kmax", kmax}});
    }
    return rr;
}

inline RunResult do_witness(const CliConfig& cfg, RunManifest& man) {
    reject_exact(cfg);
    LoadedInput in = load_form_doc(cfg, man);
    const FormVariant form = form_from_json(in.doc);
    const auto [poly, basis] = std::visit(
        [](const auto& f) { return std::make_pair(f.to_polynomial(), build_basis(f)); }, form);
    const long polish = cfg.budget > 0 ? cfg.budget : 20000;
    auto w = not_sos_witness(poly, basis, 2000, cfg.seed, polish);
    RunResult rr;
    if (w) {
        Json monos = Json::array(), yv = Json::array(), rows = Json::array();
        for (const auto& m : w->monomials) monos.push_back(to_string(m));
        for (long i = 0; i < w->y.size(); ++i) yv.push_back(w->y[i]);
        for (long i = 0; i < w->M.rows(); ++i) {
            Json row = Json::array();
            for (long j = 0; j < w->M.cols(); ++j) row.push_back(w->M(i, j));
            rows.push_back(std::move(row));
        }
        rr.exit_code = 2;  // a witness is a negative finding about the form
        rr.outputs["output"] = dump_json(Json{{"kind", "dual-witness"},
                                              {"found", true},
                                              {"Lf", w->Lf},
                                              {"lambda_min", w->lambda_min},
                                              {"monomials", std::move(monos)},
                                              {"y", std::move(yv)},
                                              {"moment_matrix", std::move(rows)}});
    } else {
        rr.exit_code = 4;  // no witness proves nothing either way
        rr.outputs["output"] = dump_json(Json{{"kind", "dual-witness"}, {"found", false}});
    }
    return rr;
}

inline RunResult do_classify(const CliConfig& cfg, RunManifest& man) {
    reject_exact(cfg);
    LoadedInput in = load_form_doc(cfg, man);
    const Form211<double> h = form211_from_json<double>(in.doc);
    const double tol = cfg.tol > 0 ? cfg.tol : 1e-8;
    const Classification cls =
        classify_211(h, tol, cfg.seed, oracle_options(cfg), rank_options(cfg));
    Json j{{"kind", "classification"},
           {"case", to_string(cls.tag)},
           {"claimed_bound", cls.claimed_bound},
           {"achieved", cls.achieved ? Json(*cls.achieved) : Json(nullptr)},
           {"swapped_yz", cls.swapped_yz},
           {"flags", cls.flags},
           {"certificate_residual", cls.certificate_residual},
           {"certificate", cls.certificate ? to_json(*cls.certificate) : Json(nullptr)}};
    if (cls.case_ii) {
        const auto& c2 = *cls.case_ii;
        j["case_ii"] = Json{{"g1", std::vector<double>(c2.g1.begin(), c2.g1.end())},
                            {"g2", std::vector<double>(c2.g2.begin(), c2.g2.end())},
                            {"remainder", std::vector<double>(c2.remainder.begin(), c2.remainder.end())},
                            {"residual_quadratic", detail::sym_to_json(c2.residual_quadratic)}};
    }
    if (cls.case_iv) {
        const auto& c4 = *cls.case_iv;
        j["case_iv"] = Json{{"h7_scale", c4.h7_scale},
                            {"P", c4.P},
                            {"alpha", c4.alpha},
                            {"beta1", c4.beta1},
                            {"beta2", c4.beta2},
                            {"normalization_residual", c4.normalization_residual},
                            {"normalized", to_json(c4.normalized.m11())}};
    }
    RunResult rr;
    rr.exit_code = cls.flags.empty() ? 0 : 2;
    rr.outputs["output"] = dump_json(j);
    return rr;
}

inline RunResult do_survey(const CliConfig& cfg, RunManifest&) {
    reject_exact(cfg);
    const int kmax = cfg.kmax > 0 ? cfg.kmax : 5;
    const SurveyReport rep =
        conjecture_survey(cfg.count, cfg.seed, kmax, oracle_options(cfg), rank_options(cfg));
    Json hist = Json::object();
    for (const auto& [k, c] : rep.histogram) hist[std::to_string(k)] = c;
    Json instances = Json::array();
    bool all_estimated = true;
    for (size_t i = 0; i < rep.instances.size(); ++i) {
        const auto& inst = rep.instances[i];
        Json ij{{"index", (int)i},
                {"seed", inst.seed},
                {"planted_k", inst.planted_k},
                {"psd_min", inst.psd_min},
                {"case", to_string(inst.tag)},
                {"estimate", inst.estimate ? Json(*inst.estimate) : Json(nullptr)},
                {"flags", inst.flags}};
        // Instances that hit the ceiling ship their coefficients for replay.
        if (inst.estimate && *inst.estimate == kmax) ij["form"] = to_json(inst.form.m11());
        if (!inst.estimate) all_estimated = false;
        instances.push_back(std::move(ij));
    }
    RunResult rr;
    rr.exit_code = all_estimated ? 0 : 4;
    rr.outputs["output"] = dump_json(Json{{"kind", "survey"},
                                          {"count", rep.count},
                                          {"master_seed", rep.master_seed},
                                          {"kmax", rep.kmax},
                                          {"histogram", std::move(hist)},
                                          {"estimate_at_kmax", rep.estimate_at_kmax},
                                          {"instances", std::move(instances)}});
    return rr;
}

}  // namespace cli_detail

inline RunResult execute(const CliConfig& cfg);

namespace cli_detail {

inline RunResult do_verify(const CliConfig& cfg, RunManifest& man) {
    if (cfg.input.empty()) throw InvalidInput("verify: needs --input <manifest>");
    LoadedInput in = load_json_file(cfg.input);
    man.input_digests["input"] = in.digest;
    const RunManifest target = RunManifest::from_json(in.doc);
    if (target.subcommand == "verify")
        throw InvalidInput("verify: refusing to verify a verify manifest");
    CliConfig rcfg = config_from_json(target.subcommand, target.parameters);

    const bool version_match = target.version == kVersion;
    Json drift = Json::array();
    for (const auto& [label, digest] : target.input_digests) {
        const std::string path = label == "certificate" ? rcfg.certificate : rcfg.input;
        std::string now;
        try {
            now = sha256_hex(read_file(path));
        } catch (const Error&) {
            now = "<unreadable>";
        }
        if (now != digest) drift.push_back(Json{{"input", label}, {"path", path}});
    }

    Json mismatched = Json::array();
    bool ran = false;
    int replay_exit = -1;
    if (drift.empty()) {
        const RunResult replay = execute(rcfg);
        ran = true;
        replay_exit = replay.exit_code;
        for (const auto& [label, digest] : target.output_digests) {
            auto it = replay.manifest.output_digests.find(label);
            if (it == replay.manifest.output_digests.end() || it->second != digest)
                mismatched.push_back(label);
        }
        for (const auto& [label, digest] : replay.manifest.output_digests)
            if (!target.output_digests.count(label)) mismatched.push_back(label);
    }

    const bool match = ran && mismatched.empty() && version_match;
    RunResult rr;
    rr.exit_code = match ? 0 : 2;
    rr.outputs["output"] = dump_json(Json{{"kind", "verify-result"},
                                          {"match", match},
                                          {"version_match", version_match},
                                          {"input_drift", std::move(drift)},
                                          {"replayed", ran},
                                          {"replay_exit_code", replay_exit},
                                          {"mismatched_outputs", std::move(mismatched)}});
    return rr;
}

}  // namespace cli_detail

/// Runs one subcommand purely in memory: artifacts come back as labeled byte
/// strings together with a manifest holding their digests.
inline RunResult execute(const CliConfig& cfg) {
    RunManifest man;
    man.subcommand = cfg.subcommand;
    man.parameters = config_to_json(cfg);
    RunResult rr;
    if (cfg.subcommand == "eval") rr = cli_detail::do_eval(cfg, man);
    else if (cfg.subcommand == "transform") rr = cli_detail::do_transform(cfg, man);
    else if (cfg.subcommand == "check-psd") rr = cli_detail::do_check_psd(cfg, man);
    else if (cfg.subcommand == "sos") rr = cli_detail::do_sos(cfg, man);
    else if (cfg.subcommand == "rank") rr = cli_detail::do_rank(cfg, man);
    else if (cfg.subcommand == "witness") rr = cli_detail::do_witness(cfg, man);
    else if (cfg.subcommand == "classify") rr = cli_detail::do_classify(cfg, man);
    else if (cfg.subcommand == "survey") rr = cli_detail::do_survey(cfg, man);
    else if (cfg.subcommand == "verify") rr = cli_detail::do_verify(cfg, man);
    else throw InvalidInput("unknown subcommand '" + cfg.subcommand + "'");
    for (const auto& [label, bytes] : rr.outputs) man.output_digests[label] = sha256_hex(bytes);
    rr.manifest = std::move(man);
    return rr;
}

namespace cli_detail {

inline std::string secondary_path(const CliConfig& cfg, const std::string& label) {
    if (cfg.out.empty()) return cfg.subcommand + "." + label + ".json";
    const size_t dot = cfg.out.rfind('.');
    if (dot == std::string::npos || cfg.out.find('/', dot) != std::string::npos)
        return cfg.out + "." + label;
    return cfg.out.substr(0, dot) + "." + label + cfg.out.substr(dot);
}

inline void write_artifacts(const CliConfig& cfg, const RunResult& rr) {
    for (const auto& [label, bytes] : rr.outputs) {
        if (label == "output") {
            if (cfg.out.empty())
                std::fwrite(bytes.data(), 1, bytes.size(), stdout);
            else
                write_file(cfg.out, bytes);
        } else {
            write_file(secondary_path(cfg, label), bytes);
        }
    }
    const std::string mpath =
        cfg.out.empty() ? cfg.subcommand + ".manifest.json" : cfg.out + ".manifest.json";
    write_file(mpath, dump_json(rr.manifest.to_json()));
}

}  // namespace cli_detail

/// Command-line front end. Exit codes: 0 success / psd / feasible,
/// 2 negative finding, 3 invalid input, 4 indeterminate.
inline int run_cli(int argc, const char* const* argv) {
    CliConfig cfg;
    CLI::App app{"sum-of-squares toolkit for biquadratic and tripartite quartic forms"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* s, bool takes_form) {
        s->add_option("--out", cfg.out, "write the primary artifact here (default: stdout)");
        s->add_option("--seed", cfg.seed, "base seed for all randomized searches");
        s->add_option("--tol", cfg.tol, "override the subcommand's default tolerance");
        s->add_option("--restarts", cfg.restarts, "override the default multi-start count");
        s->add_option("--budget", cfg.budget, "override the default iteration budget");
        if (takes_form) {
            s->add_option("--input", cfg.input, "input form (JSON)");
            s->add_option("--fixture", cfg.fixture_name,
                          "built-in form: choi, product, perfect-square, calderon-demo");
            s->add_option("--m", cfg.fixture_m, "x-dimension for shaped fixtures");
            s->add_option("--n", cfg.fixture_n, "y-dimension for shaped fixtures");
        }
    };

    CLI::App* eval = app.add_subcommand("eval", "evaluate a form at a point");
    add_common(eval, true);
    eval->add_option("--x", cfg.at_x, "x coordinates")->delimiter(',');
    eval->add_option("--y", cfg.at_y, "y coordinates")->delimiter(',');
    double zval = 0;
    CLI::Option* zopt = eval->add_option("--z", zval, "z coordinate (tripartite kinds)");
    eval->add_flag("--exact", cfg.exact, "rational arithmetic");

    CLI::App* transform = app.add_subcommand("transform", "move between biquadratic and tripartite");
    add_common(transform, true);
    transform->add_option("--direction", cfg.direction, "f2h or h2f")->required();
    transform->add_option("--certificate", cfg.certificate, "certificate to transport (JSON)");
    transform->add_flag("--exact", cfg.exact, "rational arithmetic");

    CLI::App* checkpsd = app.add_subcommand("check-psd", "sphere-product minimization oracle");
    add_common(checkpsd, true);

    CLI::App* sos = app.add_subcommand("sos", "Gram feasibility and certificate extraction");
    add_common(sos, true);

    CLI::App* rank = app.add_subcommand("rank", "smallest k with a rank-k Gram factor");
    add_common(rank, true);
    rank->add_option("--kmax", cfg.kmax, "largest k to try (default: basis size)");

    CLI::App* witness = app.add_subcommand("witness", "dual functional separating the form from sos");
    add_common(witness, true);

    CLI::App* classify = app.add_subcommand("classify", "four-way case analysis of a dim-2 form");
    add_common(classify, true);

    CLI::App* survey = app.add_subcommand("survey", "random psd instances: cases and rank estimates");
    add_common(survey, false);
    survey->add_option("--count", cfg.count, "number of instances");
    survey->add_option("--kmax", cfg.kmax, "rank search ceiling (default 5)");

    CLI::App* verify = app.add_subcommand("verify", "replay a manifest and compare output digests");
    verify->add_option("--input", cfg.input, "manifest JSON")->required();
    verify->add_option("--out", cfg.out, "write the verify result here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (zopt->count() > 0) cfg.at_z = zval;

    try {
        const RunResult rr = execute(cfg);
        cli_detail::write_artifacts(cfg, rr);
        return rr.exit_code;
    } catch (const NotPsd& e) {
        std::fprintf(stderr, "%s\n", dump_json(Json{{"error", e.what()}}).c_str());
        return 2;
    } catch (const NotPositiveDefinite& e) {
        std::fprintf(stderr, "%s\n", dump_json(Json{{"error", e.what()}}).c_str());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", dump_json(Json{{"error", e.what()}}).c_str());
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "%s\n", dump_json(Json{{"error", e.what()}}).c_str());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", dump_json(Json{{"error", e.what()}}).c_str());
        return 1;
    }
}

}  // namespace bqsos
