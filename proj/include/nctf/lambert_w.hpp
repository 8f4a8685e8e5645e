#pragma once

namespace nctf {

/// Principal branch of the Lambert W function on z >= 0: the w >= 0 with
/// w e^w = z. Halley iteration from log(1 + z). Throws NegativeArgument for
/// z < 0 (and NaN).
double lambert_w0(double z);

/// Solves w + log(w) = a for w > 0, i.e. w = W0(e^a), without forming e^a.
double lambert_w0_exp(double a);

}  // namespace nctf
