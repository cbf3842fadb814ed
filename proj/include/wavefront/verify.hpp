#pragma once

// Hypothesis audits and numerical diagnostics around existence and
// uniqueness (modulo translation) of semi-wavefronts.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/asymptotics.hpp"
#include "wavefront/models.hpp"
#include "wavefront/wavesolver.hpp"

namespace wavefront {

enum class Verdict { Pass, Fail, Undetermined };
std::string_view to_string(Verdict v) noexcept;

struct Check {
  std::string name;
  Verdict verdict = Verdict::Undetermined;
  std::string anchor;  ///< the hypothesis or result the check stands for
  std::string details;
  std::map<std::string, double> values;
};

struct VerifyReport {
  std::string title;
  std::vector<Check> checks;
  bool aborted = false;

  /// Fail if any check fails, else Undetermined if any is, else Pass.
  Verdict summary() const;
  /// 0 all pass, 1 any fail, 2 undetermined without fail.
  int exit_code() const;
  std::string text() const;
};

Check mollison_check(const ConvolutionProblem& p);

enum class Admissibility { BelowCStar, Critical, Noncritical };
std::string_view to_string(Admissibility a) noexcept;

struct AdmissibilityResult {
  Admissibility kind = Admissibility::BelowCStar;
  double c = 0.0;
  std::optional<double> c_star;
  std::optional<SpectralData> spectral;
};

AdmissibilityResult speed_admissibility(const ModelSpec& m, double c);

struct AuditResult {
  std::vector<Check> checks;
  /// "subtangential", "lipschitz_margin" or "none"
  std::string route;
};

/// Per-atom audits on [0, M] plus the uniqueness route they support.
/// `sd` defaults to real_roots of p's characteristic function when it exists.
AuditResult audit_hypotheses(const ConvolutionProblem& p, double M,
                             const SpectralData* sd = nullptr);

/// Representation check as a verdict. In the critical case the check is
/// undetermined when the grid operator has no real double root near lambda_l.
Check representation_check(const ConvolutionProblem& p, const WaveProfile& phi, const SpectralData& sd,
                           double delta, const RepresentationOptions& opts = {});

/// Default gap: half of min(lambda_r - lambda_l, alpha * lambda_l), alpha the Holder exponent at 0.
double default_delta(const SpectralData& sd, double alpha = 1.0);

struct Alignment {
  double shift = 0.0;     ///< t2 - t1 at the kappa/2 crossings
  double sup_diff = 0.0;  ///< sup |phi1(t) - phi2(t + shift)| on the common interior
  double t1 = 0.0;
  double t2 = 0.0;
  std::optional<double> fitted_shift;  ///< difference of fitted tail normalizers m
};

/// Throws Error(NoCrossing) if either profile never reaches kappa/2.
Alignment align_translate(const WaveProfile& phi1, const WaveProfile& phi2);

struct ProbeOptions {
  double tol = 1e-3;
  SolveOptions solve;
  /// Accept the last iterate of a solve that hit max_iter (reported as undetermined).
  bool accept_stalled = true;
};

VerifyReport uniqueness_probe(const ModelSpec& m, double c, const Grid& grid, const std::vector<Init>& inits,
                              const ProbeOptions& opts = {},
                              std::vector<WaveProfile>* profiles_out = nullptr);

}  // namespace wavefront
