#include <oedcs/errors.hpp>
#include <oedcs/models.hpp>
#include <oedcs/random.hpp>

#include <cmath>

namespace oedcs {

SyntheticData generate_data(const LinearOperator<double>& forward, const VectorXd& truth,
                            double noise_pct, std::uint64_t seed) {
  if (!(noise_pct >= 0.0)) throw DomainError("generate_data: noise_pct must be >= 0");
  SyntheticData out;
  out.clean = forward.apply(truth);
  const double rms = out.clean.norm() / std::sqrt(static_cast<double>(out.clean.size()));
  if (noise_pct > 0.0 && !(rms > 0.0)) {
    throw DomainError("generate_data: zero clean signal cannot carry relative noise");
  }
  out.eta = noise_pct * rms;
  out.data = out.clean;
  if (out.eta > 0.0) out.data += out.eta * gaussian_vector<double>(out.clean.size(), seed);
  return out;
}

}  // namespace oedcs
