#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sublift {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key = value settings. Lines starting with '#' are comments;
/// later assignments replace earlier ones.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    /// Copies every entry of `other`, replacing existing keys.
    void merge(const Config& other);

    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] int get_int(const std::string& key, int fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
    [[nodiscard]] std::vector<int> get_int_list(const std::string& key,
                                                const std::vector<int>& fallback) const;

    /// Keys that were set but never read; used to reject typos.
    [[nodiscard]] std::vector<std::string> unused_keys() const;
    [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

private:
    [[nodiscard]] const std::string* find(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> read_;
};

}  // namespace sublift
