#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgforge::service {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kEntityPlaceholder = "{{ENTITY}}";

struct CatalogEntry {
  std::string id;  // file stem
  std::string title;
  std::string description;
  std::string category;  // reproduce-figures, exploration or federation
  std::string query;
};

struct ProfileAspect {
  std::string name;  // file stem
  std::string title;
  std::string query;  // contains kEntityPlaceholder exactly once
};

struct ProfileTemplate {
  std::string type;
  std::vector<ProfileAspect> aspects;
};

// Query files carry "#+ key: value" header lines (title, category,
// description) followed by the query text.
std::map<std::string, std::string> read_header(const std::string& text);

// Loads <dir>/*.rq sorted by name. Every query must parse.
std::vector<CatalogEntry> load_catalog(const std::filesystem::path& dir);
// Loads <dir>/<Type>/*.rq.
std::map<std::string, ProfileTemplate> load_profiles(const std::filesystem::path& dir);

// Replaces the placeholder with <iri>. Throws ConfigError for IRIs that are
// not absolute or contain characters not allowed in an IRIREF.
std::string instantiate(const std::string& query, const std::string& iri);

}  // namespace kgforge::service
