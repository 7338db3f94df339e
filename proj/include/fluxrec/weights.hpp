#pragma once

namespace fluxrec {

/// alpha_K = min{h eps^-1/2, beta^-1/2, h^1/2}; the beta term drops when beta = 0.
double alpha_K(double h_K, double epsilon, double beta);

/// alpha_e = min{h^1/2 eps^-1/2, eps^-1/4 beta^-1/4, 1}; the beta term drops when beta = 0.
double alpha_e(double h_e, double epsilon, double beta);

}  // namespace fluxrec
