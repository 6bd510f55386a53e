#include <algorithm>
#include <cmath>

#include "cli.hpp"

namespace kerrcat::cli {

namespace {

const json& empty_object() {
  static const json e = json::object();
  return e;
}

}  // namespace

Section::Section(const json* in, json* out, std::string path)
    : in_(in ? in : &empty_object()), out_(out), path_(std::move(path)) {
  if (!in_->is_object()) throw ConfigError(path_.empty() ? "config must be an object" : path_ + " must be an object");
}

std::string Section::field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

bool Section::has(const std::string& key) const { return in_->contains(key); }

const json& Section::raw(const std::string& key) const { return in_->at(key); }

double Section::number(const std::string& key, double fallback) {
  used_.insert(key);
  double v = fallback;
  if (has(key)) {
    const auto& j = raw(key);
    if (!j.is_number()) throw ConfigError(field(key) + ": expected a number");
    v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(field(key) + ": must be finite");
  }
  (*out_)[key] = v;
  return v;
}

long Section::integer(const std::string& key, long fallback) {
  used_.insert(key);
  long v = fallback;
  if (has(key)) {
    const auto& j = raw(key);
    if (!j.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
    v = j.get<long>();
  }
  (*out_)[key] = v;
  return v;
}

bool Section::flag(const std::string& key, bool fallback) {
  used_.insert(key);
  bool v = fallback;
  if (has(key)) {
    const auto& j = raw(key);
    if (!j.is_boolean()) throw ConfigError(field(key) + ": expected true or false");
    v = j.get<bool>();
  }
  (*out_)[key] = v;
  return v;
}

std::string Section::text(const std::string& key, const std::string& fallback,
                          const std::vector<std::string>& allowed) {
  used_.insert(key);
  std::string v = fallback;
  if (has(key)) {
    const auto& j = raw(key);
    if (!j.is_string()) throw ConfigError(field(key) + ": expected a string");
    v = j.get<std::string>();
  }
  if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(field(key) + ": '" + v + "' is not one of " + list);
  }
  (*out_)[key] = v;
  return v;
}

std::vector<double> Section::numbers(const std::string& key, const std::vector<double>& fallback) {
  used_.insert(key);
  std::vector<double> v = fallback;
  if (has(key)) {
    const auto& j = raw(key);
    if (!j.is_array()) throw ConfigError(field(key) + ": expected an array of numbers");
    v.clear();
    for (const auto& e : j) {
      if (!e.is_number()) throw ConfigError(field(key) + ": expected an array of numbers");
      v.push_back(e.get<double>());
      if (!std::isfinite(v.back())) throw ConfigError(field(key) + ": entries must be finite");
    }
  }
  if (v.empty()) throw ConfigError(field(key) + ": grid is empty");
  (*out_)[key] = v;
  return v;
}

Section Section::child(const std::string& key) {
  used_.insert(key);
  const json* sub = has(key) ? &raw(key) : nullptr;
  if (sub && !sub->is_object()) throw ConfigError(field(key) + " must be an object");
  (*out_)[key] = json::object();
  return Section(sub, &(*out_)[key], field(key));
}

void Section::finish() const {
  for (const auto& [key, value] : in_->items()) {
    if (!used_.count(key)) throw ConfigError("unknown key '" + field(key) + "'");
  }
}

}  // namespace kerrcat::cli
