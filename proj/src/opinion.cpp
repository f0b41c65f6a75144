#include "cim/opinion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cim {

namespace {

// Absorbs rounding drift so (b, d, u) stays on the simplex.
Opinion renormalize(Opinion op) {
  op.b = std::max(0.0, op.b);
  op.d = std::max(0.0, op.d);
  op.u = std::max(0.0, op.u);
  const double total = op.b + op.d + op.u;
  if (std::abs(total - 1.0) > 1e-12) {
    op.b /= total;
    op.d /= total;
    op.u /= total;
  }
  op.a = std::clamp(op.a, 0.0, 1.0);
  return op;
}

}  // namespace

std::string_view to_string(TrustKind kind) {
  switch (kind) {
    case TrustKind::Uom: return "uom";
    case TrustKind::Hom: return "hom";
    case TrustKind::Nom: return "nom";
  }
  return "?";
}

TrustKind parse_trust_kind(std::string_view name) {
  if (name == "uom") return TrustKind::Uom;
  if (name == "hom") return TrustKind::Hom;
  if (name == "nom") return TrustKind::Nom;
  throw std::invalid_argument("unknown opinion model: " + std::string(name));
}

bool is_valid(const Opinion& op, double tol) {
  auto unit = [tol](double x) { return std::isfinite(x) && x >= -tol && x <= 1.0 + tol; };
  return unit(op.b) && unit(op.d) && unit(op.u) && unit(op.a) &&
         std::abs(op.b + op.d + op.u - 1.0) <= tol;
}

Opinion opinion_from_evidence(const Evidence& ev, double base_rate) {
  if (!(ev.w > 0.0) || !(ev.r >= 0.0) || !(ev.s >= 0.0)) {
    throw std::invalid_argument("evidence requires r >= 0, s >= 0 and w > 0");
  }
  if (!(base_rate >= 0.0 && base_rate <= 1.0)) {
    throw std::invalid_argument("base rate must lie in [0, 1]");
  }
  const double total = ev.r + ev.s + ev.w;
  return {ev.r / total, ev.s / total, ev.w / total, base_rate};
}

Projection project(const Opinion& op) {
  return {op.b + op.a * op.u, op.d + (1.0 - op.a) * op.u};
}

double dissonance(const Opinion& op) {
  const double mass = op.b + op.d;
  if (mass <= 0.0) return 0.0;
  const double balance = 1.0 - std::abs(op.b - op.d) / mass;
  return mass * balance;
}

double trust_coefficient(const TrustModel& model, const Opinion& receiver,
                         const Opinion& sender) {
  switch (model.kind) {
    case TrustKind::Uom:
      return (1.0 - receiver.u) * (1.0 - sender.u);
    case TrustKind::Hom: {
      const double norm_r = std::hypot(receiver.b, receiver.d);
      const double norm_s = std::hypot(sender.b, sender.d);
      if (norm_r <= 0.0 || norm_s <= 0.0) return 0.0;
      const double cosine =
          (receiver.b * sender.b + receiver.d * sender.d) / (norm_r * norm_s);
      return std::clamp(cosine, 0.0, 1.0);
    }
    case TrustKind::Nom:
      return 1.0;
  }
  return 0.0;
}

Opinion discount(const Opinion& sender, double c) {
  return {c * sender.b, c * sender.d, 1.0 - c * (1.0 - sender.u), sender.a};
}

Opinion fuse(const Opinion& receiver, const Opinion& sender, double c) {
  const Opinion& i = receiver;
  // Vacuity of the discounted sender opinion.
  const double uj = 1.0 - c * (1.0 - sender.u);
  const double beta = 1.0 - c * (1.0 - i.u) * (1.0 - sender.u);
  if (beta <= std::numeric_limits<double>::epsilon()) {
    throw std::domain_error("consensus undefined for two dogmatic opinions under full trust");
  }

  Opinion out;
  out.b = (i.b * uj + c * sender.b * i.u) / beta;
  out.d = (i.d * uj + c * sender.d * i.u) / beta;
  out.u = (i.u * uj) / beta;

  const double base_den = beta - i.u * uj;
  if (std::abs(base_den) <= 1e-15) {
    out.a = i.a;
  } else {
    out.a = ((i.a - (i.a + sender.a) * i.u) * uj + sender.a * i.u) / base_den;
  }
  return renormalize(out);
}

Opinion vacuity_maximize(const Opinion& op) {
  const Projection p = project(op);
  constexpr double inf = std::numeric_limits<double>::infinity();
  // x / 0 reads as unbounded so a in {0, 1} falls out of the same formula.
  const double via_belief = op.a > 0.0 ? p.belief / op.a : inf;
  const double via_disbelief = op.a < 1.0 ? p.disbelief / (1.0 - op.a) : inf;
  const double u = std::min({via_belief, via_disbelief, 1.0});

  Opinion out{p.belief - op.a * u, p.disbelief - (1.0 - op.a) * u, u, op.a};
  // One of b, d is zero by construction; snap the rounding residue.
  if (via_belief <= via_disbelief) {
    out.b = 0.0;
  } else {
    out.d = 0.0;
  }
  return renormalize(out);
}

Opinion apply_uom_refresh(const Opinion& op, const TrustModel& model) {
  if (model.kind != TrustKind::Uom) return op;
  if (op.u < model.xi && dissonance(op) > model.t_d) return vacuity_maximize(op);
  return op;
}

}  // namespace cim
