#pragma once

// Task reports and their JSON / text renderings.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cordfol/integrate.hpp"
#include "cordfol/rational.hpp"

namespace cordfol::report {

using Value = std::variant<bool, long, std::string, Rational, TwoPiMultiple, Estimate>;

struct Entry {
    std::string key;
    Value value;
};

enum class Status { pass, fail, error, aborted };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::error: return "error";
    case Status::aborted: return "aborted";
    }
    return "?";
}

struct TaskReport {
    std::string name;
    Status status = Status::pass;
    std::vector<Entry> values;
    std::vector<std::string> errors;
    std::vector<std::string> flags;
    double seconds = 0;

    void add(std::string key, Value v) { values.push_back({std::move(key), std::move(v)}); }
    // Records a boolean check; a false check fails the task with the given detail.
    bool check(const std::string& key, bool ok, const std::string& detail = "")
    {
        add(key, ok);
        if (!ok) {
            errors.push_back(key + (detail.empty() ? "" : ": " + detail));
            if (status == Status::pass)
                status = Status::fail;
        }
        return ok;
    }
};

struct Report {
    std::string scenario;
    std::vector<TaskReport> tasks;

    bool passed() const
    {
        for (auto& t : tasks)
            if (t.status != Status::pass)
                return false;
        return true;
    }
};

// Floats are stored rounded to a fixed number of significant digits so output is reproducible.
inline double round_sig(double v, int digits)
{
    if (!std::isfinite(v) || v == 0)
        return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    return std::strtod(buf, nullptr);
}

inline Estimate estimate(double value, double abs_err)
{
    return {round_sig(value, 12), round_sig(std::abs(abs_err), 3)};
}

inline std::string format_double(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    return buf;
}

inline nlohmann::ordered_json integer_json(const mpz_class& z)
{
    if (z.fits_slong_p())
        return z.get_si();
    return z.get_str();
}

inline nlohmann::ordered_json rational_json(const Rational& r)
{
    nlohmann::ordered_json j;
    j["num"] = integer_json(r.num());
    j["den"] = integer_json(r.den());
    return j;
}

inline nlohmann::ordered_json to_json(const Value& v)
{
    return std::visit(
        [](const auto& x) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Rational>) {
                return rational_json(x);
            } else if constexpr (std::is_same_v<T, TwoPiMultiple>) {
                nlohmann::ordered_json j;
                j["rational"] = rational_json(x.coeff);
                j["two_pi_power"] = x.power;
                return j;
            } else if constexpr (std::is_same_v<T, Estimate>) {
                nlohmann::ordered_json j;
                j["value"] = x.value;
                j["abs_err"] = x.abs_err;
                return j;
            } else {
                return x;
            }
        },
        v);
}

inline Rational rational_from_json(const nlohmann::ordered_json& j)
{
    auto part = [](const nlohmann::ordered_json& x) {
        return x.is_string() ? x.get<std::string>() : std::to_string(x.get<long>());
    };
    return Rational::parse(part(j.at("num")) + "/" + part(j.at("den")));
}

inline Value value_from_json(const nlohmann::ordered_json& j)
{
    if (j.is_boolean())
        return j.get<bool>();
    if (j.is_number_integer())
        return j.get<long>();
    if (j.is_string())
        return j.get<std::string>();
    if (j.contains("two_pi_power"))
        return TwoPiMultiple{rational_from_json(j.at("rational")), j.at("two_pi_power").get<int>()};
    if (j.contains("abs_err"))
        return Estimate{j.at("value").get<double>(), j.at("abs_err").get<double>()};
    return rational_from_json(j);
}

inline std::string text_of(const Value& v)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>)
                return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, long>)
                return std::to_string(x);
            else if constexpr (std::is_same_v<T, std::string>)
                return x;
            else if constexpr (std::is_same_v<T, Rational>)
                return x.str();
            else if constexpr (std::is_same_v<T, TwoPiMultiple>)
                return x.power == 0 ? x.coeff.str() : x.coeff.str() + "*(2pi)^" + std::to_string(x.power);
            else
                return format_double(x.value, 12) + " +- " + format_double(x.abs_err, 3);
        },
        v);
}

inline nlohmann::ordered_json to_json(const TaskReport& t)
{
    nlohmann::ordered_json j;
    j["name"] = t.name;
    j["status"] = to_string(t.status);
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (auto& e : t.values)
        values[e.key] = to_json(e.value);
    j["values"] = values;
    j["errors"] = t.errors;
    j["flags"] = t.flags;
    j["seconds"] = round_sig(t.seconds, 3);
    return j;
}

inline nlohmann::ordered_json to_json(const Report& r)
{
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["tasks"] = nlohmann::ordered_json::array();
    for (auto& t : r.tasks)
        j["tasks"].push_back(to_json(t));
    return j;
}

inline std::string emit_json(const Report& r)
{
    return to_json(r).dump(2) + "\n";
}

inline std::string emit_text(const Report& r)
{
    std::ostringstream os;
    os << "scenario " << r.scenario << "\n";
    for (auto& t : r.tasks) {
        os << "task " << t.name << ": " << to_string(t.status);
        if (t.seconds > 0)
            os << " (" << format_double(t.seconds, 3) << " s)";
        os << "\n";
        for (auto& e : t.values)
            os << "  " << e.key << " = " << text_of(e.value) << "\n";
        for (auto& f : t.flags)
            os << "  flag: " << f << "\n";
        for (auto& e : t.errors)
            os << "  error: " << e << "\n";
    }
    os << (r.passed() ? "all tasks passed" : "some tasks did not pass") << "\n";
    return os.str();
}

inline std::string emit(const Report& r, const std::string& format)
{
    return format == "text" ? emit_text(r) : emit_json(r);
}

} // namespace cordfol::report
