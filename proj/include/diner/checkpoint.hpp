#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "diner/model.hpp"

namespace diner {

/// Model plus the configuration text it was trained with.
template <typename Real>
struct Checkpoint {
    Model<Real> model;
    std::string config_echo;
};

/// Layout: "DINC", u32 version, u8 model kind, u8 dtype, config echo
/// string, then either a serialized hash table (DINER) or the baseline's
/// grid extents and encoding, then the backbone (activation tag, omega0,
/// layer count, per layer rows/cols and weight/bias values).
template <typename Real>
void save_checkpoint(const Model<Real>& model, const std::string& config_echo, std::ostream& os);

/// Values are converted to Real whatever dtype was stored.
template <typename Real>
[[nodiscard]] Checkpoint<Real> load_checkpoint(std::istream& is);

template <typename Real>
void save_checkpoint(const Model<Real>& model, const std::string& config_echo,
                     const std::filesystem::path& path);
template <typename Real>
[[nodiscard]] Checkpoint<Real> load_checkpoint(const std::filesystem::path& path);

} // namespace diner
