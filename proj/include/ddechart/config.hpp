#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ddechart/chart.hpp"
#include "ddechart/delay.hpp"

namespace ddechart {

// Flat "key = value" configuration ('#' starts a comment). Unknown keys are
// rejected so typos surface as config-invalid instead of silent defaults.
class RunConfig {
public:
    RunConfig();  // defaults only

    static RunConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);  // validates the key
    void apply_override(const std::string& key_equals_value);    // "key=value"

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;  // comma separated

    // The effective key/value map (defaults merged with overrides), sorted.
    const std::map<std::string, std::string>& entries() const { return entries_; }

    GridSpec grid() const;
    ScalarField make_f(const std::string& preset_key = "f.preset") const;
    std::shared_ptr<IntegralDelay> make_delay() const;
    ChartAtlas make_atlas() const;

    // Post-parse semantic validation (positivity, ranges, required fields).
    void validate() const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace ddechart
