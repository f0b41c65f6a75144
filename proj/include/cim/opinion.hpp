#pragma once

#include <string_view>

namespace cim {

/// Binomial Subjective Logic opinion: belief, disbelief, vacuity and base rate.
///
/// `b` is belief in the true information, `d` belief in the false one, `u` the
/// mass left unassigned for lack of evidence and `a` the prior favouring the
/// true information. A valid opinion has every component in [0, 1] and
/// b + d + u = 1.
struct Opinion {
  double b = 0.0;
  double d = 0.0;
  double u = 1.0;
  double a = 0.5;

  friend bool operator==(const Opinion&, const Opinion&) = default;
};

/// Evidence counts behind an opinion. `w` is the non-informative prior weight.
struct Evidence {
  double r = 0.0;
  double s = 0.0;
  double w = 2.0;
};

/// Projected probabilities of belief and disbelief.
struct Projection {
  double belief = 0.5;
  double disbelief = 0.5;
};

enum class TrustKind { Uom, Hom, Nom };

std::string_view to_string(TrustKind kind);
TrustKind parse_trust_kind(std::string_view name);

/// Trust filter applied by a receiver before fusing a sender's opinion.
struct TrustModel {
  TrustKind kind = TrustKind::Uom;
  /// Vacuity threshold below which UOM considers vacuity maximization.
  double xi = 0.01;
  /// Dissonance threshold above which UOM maximizes vacuity.
  double t_d = 0.6;
  /// Opinions with u <= t_u stop updating.
  double t_u = 0.01;
};

constexpr double kSimplexTolerance = 1e-9;

bool is_valid(const Opinion& op, double tol = kSimplexTolerance);

Opinion opinion_from_evidence(const Evidence& ev, double base_rate);

Projection project(const Opinion& op);

/// (b + d) * Bal(b, d); zero for a vacuous opinion.
double dissonance(const Opinion& op);

/// Receiver i's trust in sender j under the given model. Symmetric.
double trust_coefficient(const TrustModel& model, const Opinion& receiver,
                         const Opinion& sender);

/// Trust discounting of a sender's opinion by coefficient c in [0, 1].
Opinion discount(const Opinion& sender, double c);

/// Cumulative fusion of the receiver's opinion with the sender's opinion
/// discounted by `c`. Throws std::domain_error when both opinions are dogmatic
/// and c == 1, where the consensus is undefined.
Opinion fuse(const Opinion& receiver, const Opinion& sender, double c);

/// Re-expresses `op` with the largest vacuity that keeps its projection.
Opinion vacuity_maximize(const Opinion& op);

/// UOM refresh: near-dogmatic but dissonant opinions are vacuity-maximized so
/// they can absorb new evidence. Identity for every other opinion and model.
Opinion apply_uom_refresh(const Opinion& op, const TrustModel& model);

}  // namespace cim
