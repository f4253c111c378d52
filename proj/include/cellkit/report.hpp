#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "cellkit/io.hpp"

namespace cellkit {

struct Check {
    std::string name;
    json value;
    json threshold; // null when the check is a plain predicate
    bool pass = false;
};

class RunReport {
public:
    explicit RunReport(std::string command) : command_(std::move(command)), start_(clock::now()) {}

    void set_input(const std::string& bytes) { digest_ = digest(bytes); }
    void set_params(json p) { params_ = std::move(p); }
    void set_result(json r) { result_ = std::move(r); }

    void check(const std::string& name, json value, json threshold, bool pass)
    {
        for (const auto& c : checks_)
            if (c.name == name) fail("DuplicateCheck", name);
        checks_.push_back({name, std::move(value), std::move(threshold), pass});
    }
    void check(const std::string& name, bool pass) { check(name, pass, nullptr, pass); }

    // Wall time of a named phase, in seconds.
    template <class F>
    auto timed(const std::string& phase, F&& f)
    {
        auto t0 = clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            timings_[phase] = seconds(t0);
        } else {
            auto r = f();
            timings_[phase] = seconds(t0);
            return r;
        }
    }

    bool pass() const
    {
        for (const auto& c : checks_)
            if (!c.pass) return false;
        return true;
    }
    const std::vector<Check>& checks() const { return checks_; }

    json to_json() const
    {
        json j{{"command", command_}, {"pass", pass()}};
        if (!digest_.empty()) j["input_digest"] = digest_;
        if (!params_.is_null()) j["params"] = params_;
        json cs = json::array();
        for (const auto& c : checks_)
            cs.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
        j["checks"] = std::move(cs);
        json t = timings_;
        t["total"] = seconds(start_);
        j["timings"] = std::move(t);
        if (!result_.is_null()) j["result"] = result_;
        return j;
    }

private:
    using clock = std::chrono::steady_clock;
    static double seconds(clock::time_point t0)
    {
        return std::chrono::duration<double>(clock::now() - t0).count();
    }

    std::string command_;
    std::string digest_;
    json params_;
    json result_;
    std::vector<Check> checks_;
    std::map<std::string, double> timings_;
    clock::time_point start_;
};

} // namespace cellkit
