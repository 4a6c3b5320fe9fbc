#pragma once

#include <string>

#include "bqsos/errors.hpp"
#include "bqsos/forms.hpp"

namespace bqsos {

/// The classical 3x3 psd-but-not-sos form. Both halves of that claim are
/// checked by the bundled oracles in the test suite: the sphere-product
/// minimum stays above -1e-6 and the dual witness reaches L(f) <= -1e-3.
inline BiquadraticForm<double> choi_form() {
    BiquadraticForm<double> f(3, 3);
    for (int i = 0; i < 3; ++i) f.set_coeff(i, i, i, i, 1.0);
    f.set_coeff(0, 0, 1, 1, 2.0);
    f.set_coeff(1, 1, 2, 2, 2.0);
    f.set_coeff(2, 2, 0, 0, 2.0);
    f.set_coeff(0, 1, 0, 1, -2.0);
    f.set_coeff(1, 2, 1, 2, -2.0);
    f.set_coeff(0, 2, 0, 2, -2.0);
    return f;
}

/// (sum x_i^2)(sum y_k^2): the all-ones diagonal, a sum of the mn squares
/// (x_i y_k)^2.
inline BiquadraticForm<double> product_form(int m, int n) {
    BiquadraticForm<double> f(m, n);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < n; ++k) f.set_coeff(i, i, k, k, 1.0);
    return f;
}

/// (sum_{i<=min(m,n)} x_i y_i)^2: sos rank exactly one.
inline BiquadraticForm<double> perfect_square_form(int m, int n) {
    BiquadraticForm<double> f(m, n);
    const int d = std::min(m, n);
    for (int i = 0; i < d; ++i) {
        f.set_coeff(i, i, i, i, 1.0);
        for (int j = i + 1; j < d; ++j) f.set_coeff(i, j, i, j, 2.0);
    }
    return f;
}

/// A 3x2 illustration of the m x 2 bound: product plus one rank-one square.
inline BiquadraticForm<double> calderon_demo_form() {
    BiquadraticForm<double> f = product_form(3, 2);
    f.add_coeff(0, 0, 0, 0, 1.0);
    f.add_coeff(0, 1, 0, 1, 2.0);
    f.add_coeff(1, 1, 1, 1, 1.0);
    return f;
}

/// Named built-in forms for the CLI and tests. m, n apply to the shaped
/// fixtures and are ignored by the fixed ones.
inline BiquadraticForm<double> fixture(const std::string& name, int m = 3, int n = 3) {
    if (name == "choi") return choi_form();
    if (name == "product") return product_form(m, n);
    if (name == "perfect-square") return perfect_square_form(m, n);
    if (name == "calderon-demo") return calderon_demo_form();
    throw UnknownFixture("unknown fixture '" + name + "'");
}

inline std::string fixture_note(const std::string& name) {
    if (name == "choi")
        return "3x3 psd non-sos form; psd and non-sos both re-checked by the bundled oracles";
    if (name == "product") return "(sum x_i^2)(sum y_k^2)";
    if (name == "perfect-square") return "(sum x_i y_i)^2, sos rank 1";
    if (name == "calderon-demo") return "3x2 product plus one square";
    throw UnknownFixture("unknown fixture '" + name + "'");
}

}  // namespace bqsos
