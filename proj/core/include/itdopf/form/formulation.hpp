#pragma once

#include <optional>
#include <string>

namespace itdopf::form {

/// Formulation pair: transmission variable space + matching unbalanced
/// distribution space + boundary coupler.
enum class Formulation {
  AcpAcpu,  ///< AC polar (magnitude / angle)
  AcrAcru,  ///< AC rectangular (real / imaginary voltage)
  IvrIvru,  ///< current-voltage rectangular
  NfaNfau,  ///< lossless active-power transportation model
};

inline constexpr Formulation kAllFormulations[] = {
    Formulation::AcpAcpu, Formulation::AcrAcru, Formulation::IvrIvru,
    Formulation::NfaNfau};

inline const char* tag(Formulation f) {
  switch (f) {
    case Formulation::AcpAcpu: return "acp-acpu";
    case Formulation::AcrAcru: return "acr-acru";
    case Formulation::IvrIvru: return "ivr-ivru";
    case Formulation::NfaNfau: return "nfa-nfau";
  }
  return "?";
}

inline std::optional<Formulation> formulation_from_tag(const std::string& s) {
  if (s == "acp-acpu") return Formulation::AcpAcpu;
  if (s == "acr-acru") return Formulation::AcrAcru;
  if (s == "ivr-ivru") return Formulation::IvrIvru;
  if (s == "nfa-nfau") return Formulation::NfaNfau;
  return std::nullopt;
}

inline bool is_polar(Formulation f) { return f == Formulation::AcpAcpu; }
inline bool is_rectangular(Formulation f) {
  return f == Formulation::AcrAcru || f == Formulation::IvrIvru;
}
inline bool has_reactive(Formulation f) { return f != Formulation::NfaNfau; }
inline bool has_voltage(Formulation f) { return f != Formulation::NfaNfau; }
inline bool has_currents(Formulation f) { return f == Formulation::IvrIvru; }

}  // namespace itdopf::form
