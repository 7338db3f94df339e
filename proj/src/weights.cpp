#include "fluxrec/weights.hpp"

#include <algorithm>
#include <cmath>

namespace fluxrec {

double alpha_K(double h_K, double epsilon, double beta) {
    double a = std::min(h_K / std::sqrt(epsilon), std::sqrt(h_K));
    if (beta > 0.0) a = std::min(a, 1.0 / std::sqrt(beta));
    return a;
}

double alpha_e(double h_e, double epsilon, double beta) {
    double a = std::min(std::sqrt(h_e) / std::sqrt(epsilon), 1.0);
    if (beta > 0.0) a = std::min(a, 1.0 / std::sqrt(std::sqrt(epsilon * beta)));
    return a;
}

}  // namespace fluxrec
