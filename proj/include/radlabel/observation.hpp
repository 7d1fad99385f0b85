#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace radlabel {

// Declaration order is the column order of every labels CSV.
enum class Observation : std::size_t {
  NoFinding,
  EnlargedCardiomediastinum,
  Cardiomegaly,
  LungLesion,
  LungOpacity,
  Edema,
  Consolidation,
  Pneumonia,
  Atelectasis,
  Pneumothorax,
  PleuralEffusion,
  PleuralOther,
  Fracture,
  SupportDevices,
};

inline constexpr std::size_t kObservationCount = 14;

inline constexpr std::array<Observation, kObservationCount> kAllObservations = {
    Observation::NoFinding,       Observation::EnlargedCardiomediastinum,
    Observation::Cardiomegaly,    Observation::LungLesion,
    Observation::LungOpacity,     Observation::Edema,
    Observation::Consolidation,   Observation::Pneumonia,
    Observation::Atelectasis,     Observation::Pneumothorax,
    Observation::PleuralEffusion, Observation::PleuralOther,
    Observation::Fracture,        Observation::SupportDevices,
};

namespace detail {
struct ObservationInfo {
  std::string_view name;
  std::string_view slug;
  bool is_pathology;
};

inline constexpr std::array<ObservationInfo, kObservationCount> kObservationInfo = {{
    {"No Finding", "no_finding", false},
    {"Enlarged Cardiomediastinum", "enlarged_cardiomediastinum", true},
    {"Cardiomegaly", "cardiomegaly", true},
    {"Lung Lesion", "lung_lesion", true},
    {"Lung Opacity", "lung_opacity", true},
    {"Edema", "edema", true},
    {"Consolidation", "consolidation", true},
    {"Pneumonia", "pneumonia", true},
    {"Atelectasis", "atelectasis", true},
    {"Pneumothorax", "pneumothorax", true},
    {"Pleural Effusion", "pleural_effusion", true},
    {"Pleural Other", "pleural_other", true},
    {"Fracture", "fracture", true},
    {"Support Devices", "support_devices", false},
}};
}  // namespace detail

constexpr std::size_t index_of(Observation o) { return static_cast<std::size_t>(o); }

constexpr std::string_view name_of(Observation o) {
  return detail::kObservationInfo[index_of(o)].name;
}

// File stem used for phrase lists, e.g. "pleural_effusion".
constexpr std::string_view slug_of(Observation o) {
  return detail::kObservationInfo[index_of(o)].slug;
}

constexpr bool is_pathology(Observation o) {
  return detail::kObservationInfo[index_of(o)].is_pathology;
}

// No Finding is never extracted from text; it is computed from the others.
constexpr bool is_derived(Observation o) { return o == Observation::NoFinding; }

inline std::optional<Observation> observation_from_slug(std::string_view slug) {
  for (Observation o : kAllObservations) {
    if (slug_of(o) == slug) return o;
  }
  return std::nullopt;
}

inline std::optional<Observation> observation_from_name(std::string_view name) {
  for (Observation o : kAllObservations) {
    if (name_of(o) == name) return o;
  }
  return std::nullopt;
}

}  // namespace radlabel
