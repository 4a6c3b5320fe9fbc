#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdio>
#include <filesystem>

#include "bqsos/cli_app.hpp"
#include "bqsos/generators.hpp"

using namespace bqsos;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("bqsos-test-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"bqsos"};
    argv.insert(argv.end(), args);
    return run_cli((int)argv.size(), argv.data());
}

}  // namespace

TEST_CASE("every fixture round-trips through its wire schema") {
    for (const char* name : {"choi", "product", "perfect-square", "calderon-demo"}) {
        const BiquadraticForm<double> f = fixture(name, 3, 2);
        const Json j = to_json(f);
        const BiquadraticForm<double> back = biquadratic_from_json<double>(j);
        REQUIRE(back == f);
        REQUIRE(dump_json(to_json(back)) == dump_json(j));
    }
    REQUIRE_THROWS_AS(fixture("nope", 3, 3), UnknownFixture);
}

TEST_CASE("tripartite and degenerated forms round-trip as documents") {
    auto [f, fc] = random_sos_biquadratic(3, 2, 4, 42);
    const TripartiteForm<double> h = biquadratic_to_tripartite(f);
    const TripartiteForm<double> h2 = tripartite_from_json<double>(to_json(h));
    REQUIRE(dump_json(to_json(h2)) == dump_json(to_json(h)));

    auto [m, mc] = random_sos_m11(3, 4, 43);
    const M11Form<double> m2 = m11_from_json<double>(to_json(m));
    REQUIRE(dump_json(to_json(m2)) == dump_json(to_json(m)));

    // the variant reader dispatches on "kind"
    const FormVariant v = form_from_json(to_json(h));
    REQUIRE(std::holds_alternative<TripartiteForm<double>>(v));
}

TEST_CASE("rational coefficients survive the wire exactly") {
    BiquadraticForm<Rational> f(2, 2);
    f.set_coeff(0, 0, 0, 0, Rational(2, 3));
    f.set_coeff(0, 1, 0, 1, Rational(-7, 5));
    f.set_coeff(1, 1, 1, 1, Rational(4));
    const Json j = to_json(f);
    // exact values are emitted as "p/q" strings, integers as numbers
    bool saw_string = false;
    for (const auto& e : j.at("coeffs")) saw_string |= e.at("v").is_string();
    REQUIRE(saw_string);
    const auto back = biquadratic_from_json<Rational>(j);
    REQUIRE(back == f);

    // floats are refused where exactness is promised
    REQUIRE_THROWS_AS(scalar_from_json<Rational>(Json(0.5), "$.v"), InvalidInput);
    REQUIRE(scalar_from_json<Rational>(Json(3.0), "$.v") == Rational(3));
    REQUIRE(scalar_from_json<Rational>(Json("1/3"), "$.v") == Rational(1, 3));
}

TEST_CASE("schema violations name the offending path") {
    Json j = to_json(choi_form());
    j["coeffs"][0].erase("k");
    try {
        biquadratic_from_json<double>(j);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        REQUIRE(std::string(e.what()).find("coeffs[0]") != std::string::npos);
    }

    Json bad = Json{{"kind", "unheard-of"}};
    REQUIRE_THROWS_AS(form_from_json(bad), InvalidInput);
}

TEST_CASE("certificates carry basis, squares and optional weights") {
    auto [f, cert] = random_sos_biquadratic(2, 2, 3, 77);
    const Json j = to_json(cert);
    const auto back = certificate_from_json<double>(j);
    REQUIRE(back.basis == cert.basis);
    REQUIRE(back.squares == cert.squares);
    REQUIRE(back.verify(f.to_polynomial(), 1e-9).pass);

    SosCertificate<Rational> wc;
    wc.basis = m11_basis(2);
    wc.squares.push_back({Rational(1), Rational(0), Rational(0), Rational(0), Rational(2)});
    wc.weights.push_back(Rational(1, 2));
    const auto wback = certificate_from_json<Rational>(to_json(wc));
    REQUIRE(wback.weights == wc.weights);
}

TEST_CASE("configs rebuild exactly from their manifest image") {
    CliConfig c;
    c.subcommand = "rank";
    c.input = "some/form.json";
    c.seed = 99;
    c.tol = 1e-5;
    c.kmax = 3;
    c.at_x = {1.0, 2.0};
    c.at_z = 0.25;
    const CliConfig back = config_from_json("rank", config_to_json(c));
    REQUIRE(back.subcommand == c.subcommand);
    REQUIRE(back.input == c.input);
    REQUIRE(back.seed == c.seed);
    REQUIRE(back.tol == c.tol);
    REQUIRE(back.kmax == c.kmax);
    REQUIRE(back.at_x == c.at_x);
    REQUIRE(back.at_z == c.at_z);
    REQUIRE(dump_json(config_to_json(back)) == dump_json(config_to_json(c)));
}

TEST_CASE("executions are replayable from their manifests") {
    TempDir tmp;
    CliConfig c;
    c.subcommand = "survey";
    c.count = 6;
    c.seed = 515;
    c.kmax = 4;
    const RunResult first = execute(c);
    REQUIRE(first.exit_code == 0);
    write_file(tmp.file("survey.manifest.json"), dump_json(first.manifest.to_json()));

    CliConfig v;
    v.subcommand = "verify";
    v.input = tmp.file("survey.manifest.json");
    const RunResult check = execute(v);
    REQUIRE(check.exit_code == 0);
    const Json verdict = Json::parse(check.outputs.at("output"));
    REQUIRE(verdict.at("match").get<bool>());

    // a tampered output digest is a mismatch, not an error
    RunManifest forged = first.manifest;
    forged.output_digests["output"] = std::string(64, '0');
    write_file(tmp.file("forged.manifest.json"), dump_json(forged.to_json()));
    v.input = tmp.file("forged.manifest.json");
    const RunResult bad = execute(v);
    REQUIRE(bad.exit_code == 2);
    REQUIRE_FALSE(Json::parse(bad.outputs.at("output")).at("match").get<bool>());

    // verify-of-verify is refused
    write_file(tmp.file("verify.manifest.json"), dump_json(check.manifest.to_json()));
    v.input = tmp.file("verify.manifest.json");
    REQUIRE_THROWS_AS(execute(v), InvalidInput);
}

TEST_CASE("input drift is detected before replaying") {
    TempDir tmp;
    const std::string form_path = tmp.file("f.json");
    write_file(form_path, dump_json(to_json(perfect_square_form(2, 2))));

    CliConfig c;
    c.subcommand = "check-psd";
    c.input = form_path;
    const RunResult run = execute(c);
    REQUIRE(run.exit_code == 0);
    write_file(tmp.file("m.json"), dump_json(run.manifest.to_json()));

    write_file(form_path, dump_json(to_json(choi_form())));  // drift
    CliConfig v;
    v.subcommand = "verify";
    v.input = tmp.file("m.json");
    const RunResult check = execute(v);
    REQUIRE(check.exit_code == 2);
    const Json verdict = Json::parse(check.outputs.at("output"));
    REQUIRE_FALSE(verdict.at("replayed").get<bool>());
    REQUIRE(verdict.at("input_drift").size() == 1);
}

TEST_CASE("exit codes separate findings from failures") {
    TempDir tmp;
    // 0: psd fixture
    REQUIRE(cli({"check-psd", "--fixture", "product", "--m", "2", "--n", "2", "--out",
                 tmp.file("a.json").c_str()}) == 0);
    // 2: a validated negative finding
    REQUIRE(cli({"witness", "--fixture", "choi", "--out", tmp.file("b.json").c_str()}) == 2);
    // 3: unreadable input
    REQUIRE(cli({"eval", "--input", tmp.file("missing.json").c_str(), "--x", "1", "--y", "1",
                 "--out", tmp.file("c.json").c_str()}) == 3);
    // 3: unknown fixture name
    REQUIRE(cli({"check-psd", "--fixture", "nope", "--out", tmp.file("d.json").c_str()}) == 3);
    // 4: rank search exhausted below the true rank
    REQUIRE(cli({"rank", "--fixture", "product", "--m", "2", "--n", "2", "--kmax", "1", "--out",
                 tmp.file("e.json").c_str()}) == 4);
    // artifacts land next to --out
    REQUIRE(fs::exists(tmp.file("a.json")));
    REQUIRE(fs::exists(tmp.file("a.json.manifest.json")));
    const Json a = Json::parse(read_file(tmp.file("a.json")));
    REQUIRE(a.at("kind").get<std::string>() == "psd-verdict");
    REQUIRE(a.at("psd").get<bool>());
}

TEST_CASE("malformed json reports the file and parse position") {
    TempDir tmp;
    write_file(tmp.file("broken.json"), "{\"kind\": ");
    try {
        cli_detail::load_json_file(tmp.file("broken.json"));
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        REQUIRE(std::string(e.what()).find("broken.json") != std::string::npos);
    }
}

TEST_CASE("eval agrees with direct evaluation and respects --exact") {
    TempDir tmp;
    CliConfig c;
    c.subcommand = "eval";
    c.fixture_name = "choi";
    c.at_x = {1.0, 1.0, 1.0};
    c.at_y = {1.0, 1.0, 1.0};
    c.exact = true;
    const RunResult r = execute(c);
    REQUIRE(r.exit_code == 0);
    const Json out = Json::parse(r.outputs.at("output"));
    REQUIRE(out.at("value").get<std::string>() == "3");

    c.exact = false;
    const Json outf = Json::parse(execute(c).outputs.at("output"));
    REQUIRE(outf.at("value").get<double>() == Catch::Approx(3.0));

    // --exact is confined to the two algebraic subcommands
    CliConfig bad;
    bad.subcommand = "check-psd";
    bad.fixture_name = "choi";
    bad.exact = true;
    REQUIRE_THROWS_AS(execute(bad), InvalidInput);
}

TEST_CASE("transform transports certificates next to the main artifact") {
    TempDir tmp;
    auto [f, cert] = random_sos_biquadratic(3, 2, 3, 144);
    write_file(tmp.file("f.json"), dump_json(to_json(f)));
    write_file(tmp.file("f.cert.json"), dump_json(to_json(cert)));

    REQUIRE(cli({"transform", "--input", tmp.file("f.json").c_str(), "--direction", "f2h",
                 "--certificate", tmp.file("f.cert.json").c_str(), "--out",
                 tmp.file("h.json").c_str()}) == 0);
    REQUIRE(fs::exists(tmp.file("h.json")));
    REQUIRE(fs::exists(tmp.file("h.certificate.json")));

    const auto h = tripartite_from_json<double>(Json::parse(read_file(tmp.file("h.json"))));
    const auto hc = certificate_from_json<double>(Json::parse(read_file(tmp.file("h.certificate.json"))));
    REQUIRE(hc.verify(h.to_polynomial(), 1e-9).pass);
    REQUIRE(hc.length() == cert.length());
}
