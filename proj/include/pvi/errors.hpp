#pragma once

#include <stdexcept>
#include <string>

namespace pvi {

// Failure conditions surfaced by the library. The CLI maps these to exit
// codes; tests match on the code rather than the message.
enum class errc {
  pole_at_nonpositive_integer,
  outside_disk,
  outside_fourier_domain,
  near_pole,
  wrong_regime,
  non_generic_data,
  zero_r,
  near_integer_sigma,
  internal_inconsistency,
  singular_input,
  degenerate_conjugator,
  singular_denominator,
  step_collapse,
  path_blocked,
  fit_ill_conditioned,
  outside_validity_radius,
  expansion_domain,
  unsupported_regime,
  bad_input,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::pole_at_nonpositive_integer: return "pole_at_nonpositive_integer";
    case errc::outside_disk: return "outside_disk";
    case errc::outside_fourier_domain: return "outside_fourier_domain";
    case errc::near_pole: return "near_pole";
    case errc::wrong_regime: return "wrong_regime";
    case errc::non_generic_data: return "non_generic_data";
    case errc::zero_r: return "zero_r";
    case errc::near_integer_sigma: return "near_integer_sigma";
    case errc::internal_inconsistency: return "internal_inconsistency";
    case errc::singular_input: return "singular_input";
    case errc::degenerate_conjugator: return "degenerate_conjugator";
    case errc::singular_denominator: return "singular_denominator";
    case errc::step_collapse: return "step_collapse";
    case errc::path_blocked: return "path_blocked";
    case errc::fit_ill_conditioned: return "fit_ill_conditioned";
    case errc::outside_validity_radius: return "outside_validity_radius";
    case errc::expansion_domain: return "expansion_domain";
    case errc::unsupported_regime: return "unsupported_regime";
    case errc::bad_input: return "bad_input";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace pvi
