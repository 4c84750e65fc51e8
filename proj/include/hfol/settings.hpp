#pragma once

#include <string>

namespace hfol {

enum class Exec { serial, parallel };

/// (C, beta, alpha): the class F_(C,beta) and the metric exponent alpha.
struct HolderClass {
    double C = 2.0;
    double beta = 0.5;
    double alpha = 0.25;

    /// Throws ParameterError unless C > 1 and 0 <= alpha < beta < 1.
    void validate() const;
};

struct EvalSettings {
    double root_tol = 1e-12;       // absolute, in f-values
    int root_max_iter = 200;
    int mollifier_nodes = 64;      // Gauss-Legendre order of the convolution rule
    double drift_tol = 1e-8;       // node-doubling self-check of a mollification
    double strip_rel_tol = 1e-10;  // strip quadrature tolerance, times 2^-n
    int simpson_max_depth = 48;
    double fd_step = 1e-6;         // fallback central differences
    Exec exec = Exec::parallel;

    void validate() const;
    std::string digest() const;
};

} // namespace hfol
