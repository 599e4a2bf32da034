#include "sublift/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sublift {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
        }
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(number) + ": empty key");
        }
        cfg.set(key, trim(body.substr(eq + 1)));
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
    read_[key] = false;
}

void Config::merge(const Config& other) {
    for (const auto& [key, value] : other.values_) {
        set(key, value);
    }
}

bool Config::has(const std::string& key) const { return values_.contains(key); }

const std::string* Config::find(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return nullptr;
    }
    read_[key] = true;
    return &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto* v = find(key);
    return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto* v = find(key);
    if (!v) {
        return fallback;
    }
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
        throw ConfigError("config key '" + key + "': '" + *v + "' is not a number");
    }
    return out;
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto* v = find(key);
    if (!v) {
        return fallback;
    }
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
        throw ConfigError("config key '" + key + "': '" + *v + "' is not an integer");
    }
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto* v = find(key);
    if (!v) {
        return fallback;
    }
    if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") {
        return true;
    }
    if (*v == "0" || *v == "false" || *v == "no" || *v == "off") {
        return false;
    }
    throw ConfigError("config key '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
    const auto* v = find(key);
    if (!v) {
        return fallback;
    }
    std::vector<int> out;
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        int value = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw ConfigError("config key '" + key + "': '" + *v + "' is not a list of integers");
        }
        out.push_back(value);
    }
    if (out.empty()) {
        throw ConfigError("config key '" + key + "' is an empty list");
    }
    return out;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, seen] : read_) {
        if (!seen) {
            out.push_back(key);
        }
    }
    return out;
}

}  // namespace sublift
