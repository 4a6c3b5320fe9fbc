// Acceptance gate: nine library-level criteria, one pass/fail line each.
// Run with no arguments for the full gate, or pass criterion numbers to run a
// subset (e.g. `acceptance 3 7`). Exit code = number of failed criteria.
// Every tolerance and budget is pinned here, next to the check it governs.
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "bqsos/cli_app.hpp"
#include "bqsos/dual_witness.hpp"
#include "bqsos/fixtures.hpp"
#include "bqsos/generators.hpp"
#include "bqsos/gram.hpp"
#include "bqsos/m11_analysis.hpp"
#include "bqsos/psd_oracle.hpp"
#include "bqsos/rank_search.hpp"
#include "bqsos/transforms.hpp"

using namespace bqsos;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string join(const std::vector<uint64_t>& seeds) {
    std::ostringstream os;
    for (size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
    return os.str();
}

// --- 1: certificate transport round trip -----------------------------------
// 50 seeded sos forms, 2 <= n <= m <= 4, K <= mn. Forward and inverse
// transport must verify at 1e-9 relative with the square count preserved.
Outcome c1_transport() {
    constexpr double kTol = 1e-9;
    constexpr double kBudgetSec = 10.0;
    const auto t0 = Clock::now();
    const std::array<std::pair<int, int>, 6> shapes{{{2, 2}, {3, 2}, {3, 3}, {4, 2}, {4, 3}, {4, 4}}};
    int ok = 0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto [m, n] = shapes[(size_t)i % shapes.size()];
        const int K = 1 + i % (m * n);
        auto [f, cert] = random_sos_biquadratic(m, n, K, 100 + (uint64_t)i);
        const TripartiteForm<double> h = biquadratic_to_tripartite(f);
        const auto fwd = transport_certificate(cert, f);
        const auto rep_f = fwd.verify(h.to_polynomial(), kTol);
        const auto back = transport_certificate(fwd, h);
        const auto rep_b = back.verify(f.to_polynomial(), kTol);
        worst = std::max({worst, rep_f.max_abs / (1.0 + h.to_polynomial().norm_inf()),
                          rep_b.max_abs / (1.0 + f.to_polynomial().norm_inf())});
        if (rep_f.pass && rep_b.pass && fwd.length() == (size_t)K && back.length() == (size_t)K) ++ok;
    }
    const double dt = elapsed(t0);
    Outcome o;
    o.pass = ok == 50 && dt <= kBudgetSec;
    std::ostringstream os;
    os << ok << "/50 round trips at 1e-9 relative, K preserved, worst residual " << worst << ", "
       << dt << "s of " << kBudgetSec << "s budget";
    o.detail = os.str();
    return o;
}

// --- 2: extraction length bound ---------------------------------------------
// Over 120 feasibility runs the extracted certificate never exceeds mn squares
// and always verifies. Indeterminate runs are reported, not hidden.
Outcome c2_mn_bound() {
    constexpr double kFeasTol = 1e-9;
    constexpr double kVerifyTol = 1e-7;  // extraction drops eigenvalues below 1e-6 * lambda_max
    const std::array<std::pair<int, int>, 4> shapes{{{2, 2}, {3, 2}, {2, 3}, {3, 3}}};
    int runs = 0, feasible = 0, violations = 0, verify_fail = 0;
    for (const auto& [m, n] : shapes) {
        for (int s = 0; s < 30; ++s) {
            const int K = 1 + s % (m * n);
            auto f = random_sos_biquadratic(m, n, K, 1000 * (uint64_t)(10 * m + n) + (uint64_t)s).first;
            ++runs;
            const auto r = sos_feasibility(f, kFeasTol);
            if (r.status != FeasibilityStatus::Feasible) continue;
            ++feasible;
            const auto cert = extract_certificate(r.G, build_basis(f));
            if (cert.length() > (size_t)(m * n)) ++violations;
            if (!cert.verify(f.to_polynomial(), kVerifyTol).pass) ++verify_fail;
        }
    }
    Outcome o;
    o.pass = runs >= 100 && violations == 0 && verify_fail == 0;
    std::ostringstream os;
    os << runs << " runs, " << feasible << " feasible, " << violations << " length violations, "
       << verify_fail << " verify failures at 1e-7 relative";
    o.detail = os.str();
    return o;
}

// --- 3: 2x2 rank-3 search ----------------------------------------------------
// 100 random psd 2x2 forms (half interior sums of four squares, half boundary
// forms with a planted zero). Default restarts must reach >= 95; failures
// retry at restarts x10 and persistent ones are logged with their seeds.
Outcome c3_rank3() {
    constexpr int kK = 3;
    int first_pass = 0;
    std::vector<uint64_t> recovered, flagged;
    for (int i = 0; i < 100; ++i) {
        const uint64_t seed = 7000 + (uint64_t)i;
        const BiquadraticForm<double> f = (i % 2 == 0)
                                              ? random_sos_biquadratic(2, 2, 4, seed).first
                                              : random_psd_with_zero(2, 2, 4, seed).form;
        if (rank_k_search(f, kK, seed)) {
            ++first_pass;
            continue;
        }
        RankSearchOptions more;
        more.restarts *= 10;
        if (rank_k_search(f, kK, mix_seed(seed, 97), more))
            recovered.push_back(seed);
        else
            flagged.push_back(seed);
    }
    Outcome o;
    o.pass = first_pass >= 95;
    std::ostringstream os;
    os << first_pass << "/100 on default restarts, " << recovered.size() << " recovered at x10";
    if (!recovered.empty()) os << " (seeds " << join(recovered) << ")";
    os << ", " << flagged.size() << " flagged";
    if (!flagged.empty()) os << " (seeds " << join(flagged) << ")";
    o.detail = os.str();
    return o;
}

// --- 4: the classical psd-but-not-sos form ----------------------------------
Outcome c4_choi() {
    constexpr double kPsdFloor = -1e-6;
    constexpr double kWitnessCeil = -1e-3;
    constexpr double kMomentFloor = -1e-9;
    constexpr double kAffineFloor = 1e-4;
    constexpr long kIters = 50000;
    constexpr double kBudgetSec = 60.0;
    const auto t0 = Clock::now();
    const BiquadraticForm<double> f = choi_form();

    const auto [psd_ok, v] = is_psd(f);
    const bool a = psd_ok && v.min_value >= kPsdFloor;

    const auto w = not_sos_witness(f.to_polynomial(), build_basis(f));
    const bool b = w && w->Lf <= kWitnessCeil && w->lambda_min >= kMomentFloor &&
                   std::abs(w->M.trace() - 1.0) <= 1e-9;

    const auto r = sos_feasibility(f, 1e-9, kIters);
    const bool c = r.status == FeasibilityStatus::Indeterminate && r.affine_residual >= kAffineFloor;

    const double dt = elapsed(t0);
    Outcome o;
    o.pass = a && b && c && dt <= kBudgetSec;
    std::ostringstream os;
    os << "sphere min " << v.min_value << (a ? " (>= -1e-6)" : " VIOLATES -1e-6") << "; witness Lf "
       << (w ? w->Lf : 0.0) << (b ? " (<= -1e-3, moments psd)" : " MISSING/WEAK")
       << "; feasibility residual " << r.affine_residual << " after " << r.iters << " iters"
       << (c ? " (indeterminate)" : " NOT BOUNDED AWAY") << "; " << dt << "s of " << kBudgetSec
       << "s budget";
    o.detail = os.str();
    return o;
}

// --- 5: degenerated-form property suite --------------------------------------
// 200 random sos (hence psd) degenerated forms, x-dimension 2..5. Every
// property except (v) must pass outright at 1e-8; the rank-bound sub-check (v)
// passes on >= 95% with the suite's built-in x10-restart fallback.
Outcome c5_property_suite() {
    constexpr double kTol = 1e-8;
    constexpr int kTotal = 200;
    constexpr int kVFloor = 190;
    int v_pass = 0;
    std::vector<uint64_t> hard_failures, v_failures;
    int i = 0;
    for (int dim = 2; dim <= 5; ++dim) {
        for (int s = 0; s < kTotal / 4; ++s, ++i) {
            const uint64_t seed = 50000 + (uint64_t)i;
            const auto h = random_sos_m11(dim, 1 + s % (2 * dim), seed).first;
            const PropertyReport rep = m11_property_suite(h, kTol);
            const bool non_v = rep.psd_precondition.pass && rep.i.pass && rep.ii.pass &&
                               rep.iii.pass && rep.iv.pass && rep.vi.pass;
            if (!non_v) hard_failures.push_back(seed);
            if (rep.v.pass)
                ++v_pass;
            else
                v_failures.push_back(seed);
        }
    }
    Outcome o;
    o.pass = hard_failures.empty() && v_pass >= kVFloor;
    std::ostringstream os;
    os << kTotal - (int)hard_failures.size() << "/" << kTotal << " pass (i)-(iv),(vi) at 1e-8, "
       << v_pass << "/" << kTotal << " pass (v)";
    if (!hard_failures.empty()) os << "; hard failures at seeds " << join(hard_failures);
    if (!v_failures.empty()) os << "; (v) failures at seeds " << join(v_failures);
    o.detail = os.str();
    return o;
}

// --- 6: exact rational case-II decomposition ---------------------------------
// 50 constructed instances h = (g1 y + g2 z)^2 + z^2 Q0 with rational data.
// The decomposition must return at most four squares and expand back to the
// input with residual exactly zero.
Outcome c6_case_ii_exact() {
    auto draw = [](Rng& rng) {
        return Rational(rng.uniform_int(-3, 3)) / Rational(rng.uniform_int(1, 3));
    };
    int ok = 0;
    std::vector<uint64_t> failures;
    for (int i = 0; i < 50; ++i) {
        const uint64_t seed = 600 + (uint64_t)i;
        Rng rng(seed);
        std::array<Rational, 2> g1{draw(rng), draw(rng)};
        while (g1[0] == 0 && g1[1] == 0) g1 = {draw(rng), draw(rng)};
        SosCertificate<Rational> built;
        built.basis = m11_basis(2);
        built.squares.push_back({draw(rng), draw(rng), g1[0], g1[1], draw(rng)});
        built.weights.push_back(Rational(1));
        const int extra = 2 + i % 2;
        for (int q = 0; q < extra; ++q) {
            built.squares.push_back({draw(rng), draw(rng), Rational(0), Rational(0), draw(rng)});
            built.weights.push_back(Rational(rng.uniform_int(1, 4)) / Rational(rng.uniform_int(1, 3)));
        }
        const Polynomial<Rational> target = built.expand();
        const Form211<Rational> h(M11Form<Rational>::from_tripartite(extract_components(2, 1, target)));
        try {
            const CaseII<Rational> d = case_ii_decompose(h);
            const auto rep = d.cert.verify(target, 0.0);
            if (d.remainder[0] == 0 && d.remainder[1] == 0 && d.cert.length() <= 4 &&
                rep.max_abs == 0.0)
                ++ok;
            else
                failures.push_back(seed);
        } catch (const Error&) {
            failures.push_back(seed);
        }
    }
    Outcome o;
    o.pass = ok == 50;
    std::ostringstream os;
    os << ok << "/50 decomposed with <= 4 squares and exact zero residual";
    if (!failures.empty()) os << "; failures at seeds " << join(failures);
    o.detail = os.str();
    return o;
}

// --- 7: delta three-square fit ------------------------------------------------
Outcome c7_delta_fit() {
    constexpr double kTol = 1e-8;
    int ok = 0, structured = 0;
    std::vector<uint64_t> failures;
    for (int i = 0; i < 50; ++i) {
        const uint64_t seed = 7100 + (uint64_t)i;
        const auto h = random_sos_form211(1 + i % 4, seed).first;
        const DeltaForm<double> d = delta_211(h);
        const double scale = 1.0 + d.delta.norm_inf();
        const auto dec = decompose_delta(d, seed);
        if (dec && dec->residual <= kTol * scale &&
            dec->cert.verify(d.delta, kTol).pass) {
            ++ok;
            structured += dec->structured;
        } else {
            failures.push_back(seed);
        }
    }
    Outcome o;
    o.pass = ok >= 48;
    std::ostringstream os;
    os << ok << "/50 fits at 1e-8 relative (" << structured << " structured)";
    if (!failures.empty()) os << "; failures at seeds " << join(failures);
    o.detail = os.str();
    return o;
}

// --- 8: survey determinism and replay ----------------------------------------
Outcome c8_survey() {
    constexpr int kCount = 200;
    constexpr int kKmax = 5;
    constexpr uint64_t kSeed = 20250814;
    constexpr double kBudgetSec = 300.0;
    const auto t0 = Clock::now();

    CliConfig cfg;
    cfg.subcommand = "survey";
    cfg.count = kCount;
    cfg.seed = kSeed;
    cfg.kmax = kKmax;
    const RunResult r1 = execute(cfg);
    const RunResult r2 = execute(cfg);
    const bool deterministic = r1.outputs.at("output") == r2.outputs.at("output");

    const Json rep = Json::parse(r1.outputs.at("output"));
    bool estimates_ok = r1.exit_code == 0;
    int hist_total = 0;
    for (const auto& [k, c] : rep.at("histogram").items()) {
        const int kv = std::stoi(k);
        estimates_ok = estimates_ok && kv >= 1 && kv <= kKmax;
        hist_total += c.get<int>();
    }
    estimates_ok = estimates_ok && hist_total == kCount;

    // Ceiling instances must carry their coefficients and replay to the
    // same estimate with the recorded per-instance seed.
    bool bundles_ok = true;
    int ceiling = 0;
    for (const auto& inst : rep.at("instances")) {
        if (inst.at("estimate").is_null() || inst.at("estimate").get<int>() != kKmax) continue;
        ++ceiling;
        if (!inst.contains("form")) {
            bundles_ok = false;
            continue;
        }
        const auto form = m11_from_json<double>(inst.at("form"));
        const auto est = sos_rank_estimate(Form211<double>(form).m11(), kKmax,
                                           mix_seed(inst.at("seed").get<uint64_t>(), 4));
        bundles_ok = bundles_ok && est && est->first == kKmax;
    }

    // Replay through the manifest verifier.
    const fs::path dir = fs::temp_directory_path() / ("bqsos-accept-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    write_file((dir / "survey.manifest.json").string(), dump_json(r1.manifest.to_json()));
    CliConfig vc;
    vc.subcommand = "verify";
    vc.input = (dir / "survey.manifest.json").string();
    const RunResult check = execute(vc);
    const bool replay_ok =
        check.exit_code == 0 && Json::parse(check.outputs.at("output")).at("match").get<bool>();
    fs::remove_all(dir);

    const double dt = elapsed(t0);
    Outcome o;
    o.pass = deterministic && estimates_ok && bundles_ok && replay_ok && dt <= kBudgetSec;
    std::ostringstream os;
    os << kCount << " instances, " << (deterministic ? "byte-identical reruns" : "NONDETERMINISTIC")
       << ", estimates in [1," << kKmax << "]: " << (estimates_ok ? "yes" : "NO") << ", " << ceiling
       << " ceiling instances " << (bundles_ok ? "replayable" : "NOT REPLAYABLE") << ", manifest "
       << (replay_ok ? "verified" : "MISMATCH") << ", " << dt << "s of " << kBudgetSec << "s budget";
    o.detail = os.str();
    return o;
}

// --- 9: exact identities and float invariants ---------------------------------
Outcome c9_identities() {
    constexpr double kFloatTol = 1e-12;
    int exact_fail = 0, float_fail = 0;
    auto draw = [](Rng& rng) {
        return Rational(rng.uniform_int(-5, 5)) / Rational(rng.uniform_int(1, 4));
    };
    const Var y{VarBlock::Y, 0};
    for (int s = 0; s < 10; ++s) {
        Rng rng(900 + (uint64_t)s);

        // Homogenize/dehomogenize inverse pair and component reconstruction.
        BiquadraticForm<Rational> f(3, 2);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = k; l < 2; ++l) f.add_coeff(i, j, k, l, draw(rng));
        const TripartiteForm<Rational> h = biquadratic_to_tripartite(f);
        if (!(tripartite_to_biquadratic(h) == f)) ++exact_fail;
        const TripartiteForm<Rational> rec = extract_components(2, 1, h.to_polynomial());
        if (!(rec.h0 == h.h0 && rec.h1 == h.h1 && rec.h2 == h.h2 && rec.h3 == h.h3 &&
              rec.h4 == h.h4))
            ++exact_fail;

        // Delta identity and its y-split, exactly.
        std::array<Rational, 14> c;
        for (auto& v : c) v = draw(rng);
        const Form211<Rational> g(c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8], c[9], c[10],
                                  c[11], c[12], c[13]);
        const DeltaForm<Rational> d = delta_211(g);
        const Polynomial<Rational> lhs =
            Rational(4) * g.h2_full_poly() * g.hbar4_poly() - g.hbar3_poly() * g.hbar3_poly();
        if (!(d.delta == lhs)) ++exact_fail;
        const Polynomial<Rational> yv = Polynomial<Rational>::variable(y);
        if (!(d.delta == d.delta2 + yv * d.delta1 + yv * yv * d.delta0)) ++exact_fail;

        // Float invariants: planted certificates verify, evaluation scales.
        auto [fd, cert] = random_sos_biquadratic(3, 2, 1 + s % 6, 950 + (uint64_t)s);
        if (!cert.verify(fd.to_polynomial(), kFloatTol).pass) ++float_fail;
        std::vector<double> x{0.3, -1.2, 0.7}, yy{1.1, -0.4};
        std::vector<double> x2 = x, y3 = yy;
        for (auto& t : x2) t *= 2.0;
        for (auto& t : y3) t *= 3.0;
        const double base = fd.evaluate(x, yy);
        if (std::abs(fd.evaluate(x2, y3) - 36.0 * base) > kFloatTol * 36.0 * (1.0 + std::abs(base)))
            ++float_fail;
        const TripartiteForm<double> hd = biquadratic_to_tripartite(fd);
        const double lifted = hd.evaluate({x[0], x[1]}, {yy[0]}, 1.0);
        const double direct = fd.evaluate({x[0], x[1], 1.0}, {yy[0], 1.0});
        if (std::abs(lifted - direct) > kFloatTol * (1.0 + std::abs(direct))) ++float_fail;
    }
    Outcome o;
    o.pass = exact_fail == 0 && float_fail == 0;
    std::ostringstream os;
    os << "40 exact identities (" << exact_fail << " failures), 30 float invariants at 1e-12 ("
       << float_fail << " failures)";
    o.detail = os.str();
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    struct Entry {
        int id;
        const char* label;
        Outcome (*fn)();
    };
    const std::array<Entry, 9> table{{{1, "certificate transport round trip", c1_transport},
                                      {2, "extraction length bound", c2_mn_bound},
                                      {3, "2x2 rank-3 search", c3_rank3},
                                      {4, "psd-not-sos dichotomy", c4_choi},
                                      {5, "degenerated-form property suite", c5_property_suite},
                                      {6, "exact case-II decomposition", c6_case_ii_exact},
                                      {7, "delta three-square fit", c7_delta_fit},
                                      {8, "survey determinism and replay", c8_survey},
                                      {9, "exact identities and float invariants", c9_identities}}};
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& e : table) {
        if (!which.empty() && std::find(which.begin(), which.end(), e.id) == which.end()) continue;
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        std::printf("criterion %d (%s): %s — %s\n", e.id, e.label, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures;
}
