// Result persistence: JSON serialization, the field-invariant cache and run
// manifests.  All large integers travel as decimal strings.
#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "repq/search.hpp"

namespace repq {

using ordered_json = nlohmann::ordered_json;

ordered_json invariants_to_json(const FieldInvariants& inv);
ordered_json bound_result_to_json(const BoundResult& r);
ordered_json half_split_to_json(const struct HalfSplit& hs);

/// One JSONL line per solution: {x, q, A, m, e, value_digits, class_index, bound_ok}.
std::string record_to_jsonl(const SolutionRecord& rec, unsigned long q, const Natural& A,
                            const std::vector<Natural>& m_list);

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& p);

/// Atomic write (temp file + rename), UTF-8.
void write_file_atomic(const std::filesystem::path& p, const std::string& body);

/// Single-document JSON cache q -> FieldInvariants.  Entries failing the
/// h, R <= sqrt(q) log 4q sanity bound (or malformed ones) are dropped on
/// load and recomputed, never trusted.
class FieldCache {
public:
    explicit FieldCache(std::filesystem::path path);
    /// Cached value when valid, else computes, stores and persists.
    FieldInvariants get(unsigned long q);
    bool contains(unsigned long q) const { return entries_.count(q) > 0; }
    static std::filesystem::path default_path();  // honors REPQ_FIELD_CACHE

private:
    std::filesystem::path path_;
    std::map<unsigned long, FieldInvariants> entries_;
    void load();
    void save() const;
};

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::string version;
    std::string started_at;   // ISO-8601 UTC
    std::string finished_at;
    ordered_json parameters;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256

    ordered_json to_json() const;
};

std::string iso8601_now();

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace repq
