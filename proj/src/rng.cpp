#include "tvpgamp/rng.hpp"

#include "tvpgamp/error.hpp"

#include <cmath>

namespace tvpgamp {

double Rng::inverse_gaussian(double mu, double lambda) {
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw NumericalError("inverse-Gaussian needs mu > 0 and lambda > 0");
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double nu = normal();
        const double y = nu * nu;
        double x = 0.0;
        if (std::isinf(mu)) {
            x = lambda / y;
        } else {
            // mu (1 + (w - sqrt(w^2 + 4 lambda w)) / (2 lambda)) with w = mu y,
            // rewritten without the cancelling difference
            const double w = mu * y;
            x = mu * 2.0 * lambda / (2.0 * lambda + w + std::sqrt(w * w + 4.0 * lambda * w));
            if (uniform() > mu / (mu + x)) {
                x = mu * mu / x;
            }
        }
        if (std::isfinite(x) && x > 0.0) {
            return x;
        }
    }
    throw NumericalError("inverse-Gaussian sampler failed 100 times (mu = " + std::to_string(mu) +
                         ", lambda = " + std::to_string(lambda) + ")");
}

}  // namespace tvpgamp
