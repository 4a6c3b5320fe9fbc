#include <catch2/catch_amalgamated.hpp>

#include "bqsos/fixtures.hpp"
#include "bqsos/generators.hpp"
#include "bqsos/psd_oracle.hpp"
#include "bqsos/transforms.hpp"

using namespace bqsos;

TEST_CASE("product of norms has sphere-product minimum one") {
    for (auto [m, n] : {std::pair{2, 2}, {3, 2}, {4, 3}}) {
        const PsdVerdict v = min_on_spheres(product_form(m, n));
        REQUIRE(v.min_value == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(v.verdict == Verdict::PsdLikely);
    }
}

TEST_CASE("a perfect square attains zero on its kernel") {
    const PsdVerdict v = min_on_spheres(perfect_square_form(3, 3));
    REQUIRE(std::abs(v.min_value) <= 1e-10);
    REQUIRE(v.verdict == Verdict::PsdLikely);
    // argmin is reported on the spheres
    double nx = 0, ny = 0;
    for (double t : v.x) nx += t * t;
    for (double t : v.y) ny += t * t;
    REQUIRE(nx == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(ny == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("planted zeros are found") {
    for (uint64_t seed : {5u, 6u, 7u, 8u}) {
        const PlantedZero pz = random_psd_with_zero(3, 3, 5, seed);
        auto z = find_nontrivial_zero(pz.form, 1e-8);
        REQUIRE(z.has_value());
        REQUIRE(std::abs(pz.form.evaluate(z->first, z->second)) <= 1e-8);
    }
    // strictly pd: no zero at any reasonable tolerance
    REQUIRE_FALSE(find_nontrivial_zero(random_pd_biquadratic(3, 2, 4, 0.5, 9), 1e-6).has_value());
}

TEST_CASE("the classical psd-not-sos example is recognized as psd") {
    auto [psd, v] = is_psd(choi_form());
    REQUIRE(psd);
    REQUIRE(v.min_value >= -1e-6);
}

TEST_CASE("indefinite forms yield a validated negative witness") {
    BiquadraticForm<double> f = product_form(3, 3);
    f.add_coeff(0, 1, 0, 1, -6.0);  // drive one cross term negative
    auto [psd, v] = is_psd(f);
    REQUIRE_FALSE(psd);
    REQUIRE(v.verdict == Verdict::NegativeWitness);
    REQUIRE(f.evaluate(v.x, v.y) == Catch::Approx(v.min_value).margin(1e-12));
    REQUIRE(v.min_value < -1e-3);
}

TEST_CASE("the oracle is deterministic per seed") {
    auto [f, cert] = random_sos_biquadratic(4, 3, 6, 77);
    OracleOptions a;
    a.seed = 123;
    const PsdVerdict v1 = min_on_spheres(f, a);
    const PsdVerdict v2 = min_on_spheres(f, a);
    REQUIRE(v1.min_value == v2.min_value);
    REQUIRE(v1.x == v2.x);
    REQUIRE(v1.y == v2.y);
    REQUIRE(v1.budget_used == v2.budget_used);
}

TEST_CASE("tripartite minimization agrees with the biquadratic picture") {
    // On a psd form both oracles must agree on the psd verdict; the tripartite
    // sphere is a different normalization, so only signs are comparable.
    auto [f, cert] = random_sos_biquadratic(3, 3, 4, 91);
    const TripartiteForm<double> h = biquadratic_to_tripartite(f);
    auto [psd_f, vf] = is_psd(f);
    auto [psd_h, vh] = is_psd(h);
    REQUIRE(psd_f);
    REQUIRE(psd_h);
    REQUIRE(vh.z.has_value());

    // and on an indefinite one both must find a witness
    BiquadraticForm<double> g = f;
    g.add_coeff(0, 0, 0, 0, -20.0 * (1 + f.norm_inf()));
    auto [psd_g, vg] = is_psd(g);
    auto [psd_gh, vgh] = is_psd(biquadratic_to_tripartite(g));
    REQUIRE_FALSE(psd_g);
    REQUIRE_FALSE(psd_gh);
    // the tripartite witness point really is negative
    std::vector<double> w = vgh.x;
    (void)w;
    const double hv = biquadratic_to_tripartite(g).evaluate(vgh.x, vgh.y, *vgh.z);
    REQUIRE(hv < 0);
}

TEST_CASE("degenerated forms go through the m11 overload") {
    auto [h, cert] = random_sos_m11(3, 4, 101);
    auto [psd, v] = is_psd(h);
    REQUIRE(psd);

    Form211<double> q = random_sos_form211(3, 102).first;
    auto [psd2, v2] = is_psd(q);
    REQUIRE(psd2);
}

TEST_CASE("restart budget is accounted and validated") {
    OracleOptions o;
    o.restarts = 0;
    REQUIRE_THROWS_AS(min_on_spheres(product_form(2, 2), o), InvalidInput);
    o.restarts = 3;
    o.iters = 7;
    const PsdVerdict v = min_on_spheres(product_form(2, 2), o);
    REQUIRE(v.budget_used >= 3);
    REQUIRE(v.budget_used <= 3 * 7);
}
