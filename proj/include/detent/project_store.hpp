#pragma once

// Galleries of named mechanism designs and their archive file format.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "detent/estimator.hpp"

namespace detent {

inline constexpr int kArchiveVersion = 2;
inline constexpr int kOldestArchiveVersion = 1;
inline constexpr std::string_view kArchiveFormat = "detent-gallery";

enum class EditMode { create, import, symmetric };

std::string_view to_string(EditMode mode);
std::optional<EditMode> parse_edit_mode(std::string_view text);

struct Project {
  std::string id;
  std::string name;
  Mechanism mechanism;
  EditMode edit_mode = EditMode::create;
  std::optional<FDCurve> cached_curve;
  bool curve_stale = true;  // cached_curve no longer matches mechanism
  std::int64_t created_ms = 0;
  std::int64_t modified_ms = 0;

  // Design data only; the curve cache is advisory.
  bool same_design(const Project& other) const;
};

class Gallery {
 public:
  using Clock = std::function<std::int64_t()>;

  Gallery();
  explicit Gallery(Clock clock);

  const std::vector<Project>& projects() const { return projects_; }
  std::size_t size() const { return projects_.size(); }
  const Project* find(std::string_view id) const;
  // Throws Error(not_found).
  const Project& get(std::string_view id) const;

  // Validates the mechanism; returns the stored copy.
  const Project& add(std::string name, Mechanism mechanism, EditMode mode = EditMode::create);
  // Inserts a project as-is (ids must stay unique). Used by archive loading.
  const Project& insert(Project project);
  const Project& duplicate(std::string_view id);
  void remove(std::string_view id);
  void rename(std::string_view id, std::string name);
  void set_edit_mode(std::string_view id, EditMode mode);

  // Applies edit to a copy, validates it, then publishes it with the cache
  // already marked stale. A throwing edit leaves the project untouched.
  const Project& update_mechanism(std::string_view id,
                                  const std::function<void(Mechanism&)>& edit);
  void set_cached_curve(std::string_view id, FDCurve curve);

 private:
  Project& get_mutable(std::string_view id);
  std::string fresh_id();

  std::vector<Project> projects_;
  Clock clock_;
  std::uint64_t next_id_ = 1;
};

using Json = nlohmann::json;

// Field-by-field conversions shared with the HTTP API. Readers throw
// Error(schema) naming the offending field path.
Json to_json(const Profile& profile);
Json to_json(const SideSpringSpec& spec);
Json to_json(const BaseSpringSpec& spec);
Json to_json(const Mechanism& mechanism);
Json to_json(const FDCurve& curve);
Json to_json(const FDSample& sample);
Json to_json(const Warning& warning);
Json to_json(const Project& project);

Profile profile_from_json(const Json& j, const std::string& path);
SideSpringSpec side_spring_from_json(const Json& j, const std::string& path);
BaseSpringSpec base_spring_from_json(const Json& j, const std::string& path);
Mechanism mechanism_from_json(const Json& j, const std::string& path, int version = kArchiveVersion);
FDCurve curve_from_json(const Json& j, const std::string& path);

std::string save_archive(const Gallery& gallery);
// Throws Error(version_mismatch) for unknown versions, Error(schema) otherwise.
// Cached curves come back stale.
Gallery load_archive(std::string_view text);
void save_archive_file(const Gallery& gallery, const std::filesystem::path& path);
Gallery load_archive_file(const std::filesystem::path& path);

std::int64_t now_ms();

}  // namespace detent
