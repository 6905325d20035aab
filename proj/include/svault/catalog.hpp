// Copyright (c) 2026, the svault authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Relational metadata catalog: operators own sites; sites hold hardware,
// trackers, inverters, batteries and PV modules; sensors attach to sites and
// equipment and get a global id in a central registry. Every registered
// sensor is traceable through its equipment chain up to an operator.
//
// Persistence is a single versioned JSON document, rewritten atomically on
// every mutation. Referential integrity is enforced in code at write time:
// a mutation is applied to a copy, validated in full, persisted, and only
// then made visible. Deletion is a soft tombstone so lineage of historical
// measurements keeps resolving.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "svault/errors.hpp"
#include "svault/io.hpp"
#include "svault/types.hpp"

namespace svault {

inline constexpr int kCatalogVersion = 1;

enum class SensorCategory {
  electricity,
  pv_temperature,
  irradiance,
  ambient_temperature,
  wind_speed,
  wind_direction,
  climate,
};

inline constexpr std::array<SensorCategory, 7> kAllSensorCategories = {
    SensorCategory::electricity,     SensorCategory::pv_temperature,
    SensorCategory::irradiance,      SensorCategory::ambient_temperature,
    SensorCategory::wind_speed,      SensorCategory::wind_direction,
    SensorCategory::climate,
};

inline std::string to_string(SensorCategory c) {
  switch (c) {
    case SensorCategory::electricity: return "electricity";
    case SensorCategory::pv_temperature: return "pv_temperature";
    case SensorCategory::irradiance: return "irradiance";
    case SensorCategory::ambient_temperature: return "ambient_temperature";
    case SensorCategory::wind_speed: return "wind_speed";
    case SensorCategory::wind_direction: return "wind_direction";
    case SensorCategory::climate: return "climate";
  }
  throw InvalidArgumentError("unknown sensor category");
}

inline SensorCategory sensor_category_from_string(const std::string& s) {
  for (const auto c : kAllSensorCategories)
    if (to_string(c) == s) return c;
  throw InvalidArgumentError("unknown sensor category '" + s + "'");
}

struct Operator {
  std::uint64_t id = 0;
  std::string name;
  std::string contact;
  bool retired = false;
};

struct Site {
  std::uint64_t id = 0;
  std::uint64_t operator_id = 0;
  std::string name;
  double latitude = 0;    // degrees, -90..90
  double longitude = 0;   // degrees, -180..180
  double elevation = 0;   // metres
  bool retired = false;
};

struct HardwareItem {
  std::uint64_t id = 0;
  std::string serial_number;
  std::string description;
  bool retired = false;
};

struct RatedParameter {
  double value = 0;
  std::string unit;
};

struct InverterDatasheet {
  std::uint64_t id = 0;
  std::string manufacturer;
  std::string model;
  std::map<std::string, RatedParameter> rated_parameters;
  bool retired = false;
};

struct PVDatasheet {
  std::uint64_t id = 0;
  std::string manufacturer;
  std::string model;
  std::map<std::string, RatedParameter> rated_parameters;
  bool retired = false;
};

struct Tracker {
  std::uint64_t id = 0;
  std::uint64_t site_id = 0;
  std::uint64_t hardware_id = 0;
  std::string axis_configuration;  // e.g. "single-axis-ns", "dual-axis"
  bool retired = false;
};

struct Inverter {
  std::uint64_t id = 0;
  std::uint64_t site_id = 0;
  std::uint64_t hardware_id = 0;
  std::uint64_t datasheet_id = 0;
  bool retired = false;
};

struct Battery {
  std::uint64_t id = 0;
  std::uint64_t site_id = 0;
  std::uint64_t hardware_id = 0;
  std::uint64_t inverter_id = 0;
  bool retired = false;
};

struct PVModule {
  std::uint64_t id = 0;
  std::uint64_t site_id = 0;
  std::uint64_t hardware_id = 0;
  std::uint64_t datasheet_id = 0;
  std::uint64_t inverter_id = 0;
  std::optional<std::uint64_t> tracker_id;  // absent = fixed mounting
  std::optional<double> tilt;               // degrees, fixed mounting only
  std::optional<double> orientation;        // degrees azimuth, fixed mounting only
  bool retired = false;
};

struct SensorDescriptor {
  std::uint64_t id = 0;  // local to the category
  SensorCategory category = SensorCategory::climate;
  std::uint64_t site_id = 0;
  std::uint64_t hardware_id = 0;
  std::optional<std::uint64_t> module_id;    // electricity (optional), pv_temperature (required)
  std::optional<std::uint64_t> inverter_id;  // electricity only
  std::optional<std::uint64_t> battery_id;   // electricity only
  std::optional<double> tilt;                // irradiance only
  std::optional<double> orientation;         // irradiance only
  std::string unit;
  bool retired = false;
};

struct SensorRegistryEntry {
  SensorId sensor_id;
  SensorCategory category = SensorCategory::climate;
  std::uint64_t category_local_id = 0;
  Timestamp registered_at = 0;
  bool retired = false;
};

struct LineageEntry {
  std::string kind;  // sensor | module | battery | inverter | site | operator
  std::uint64_t id = 0;
  std::string label;
};

struct SensorFilter {
  std::optional<std::uint64_t> site_id;
  std::optional<SensorCategory> category;
  bool include_retired = false;
};

class Catalog {
 public:
  struct Data {
    std::vector<Operator> operators;
    std::vector<Site> sites;
    std::vector<HardwareItem> hardware;
    std::vector<InverterDatasheet> inverter_datasheets;
    std::vector<PVDatasheet> pv_datasheets;
    std::vector<Tracker> trackers;
    std::vector<Inverter> inverters;
    std::vector<Battery> batteries;
    std::vector<PVModule> modules;
    std::vector<SensorDescriptor> sensors;
    std::vector<SensorRegistryEntry> registry;
    std::map<std::string, std::uint64_t> next_id;  // per table / per category
  };

  using Clock = std::function<Timestamp()>;

  /// In-memory catalog; nothing is persisted.
  explicit Catalog(Clock clock = nullptr) : clock_(clock ? std::move(clock) : system_clock) {
    data_ = std::make_shared<const Data>();
  }

  /// File-backed catalog: loads and validates the document if it exists,
  /// otherwise starts empty and creates it on first mutation.
  explicit Catalog(std::filesystem::path path, Clock clock = nullptr)
      : path_(std::move(path)), clock_(clock ? std::move(clock) : system_clock) {
    if (std::filesystem::exists(*path_)) {
      auto d = std::make_shared<Data>(parse_document(read_file_bytes(*path_)));
      validate(*d);
      data_ = std::move(d);
    } else {
      data_ = std::make_shared<const Data>();
    }
  }

  std::uint64_t upsert(Operator e) {
    return mutate([&](Data& d) { return upsert_row(d, d.operators, std::move(e), "operator"); });
  }
  std::uint64_t upsert(Site e) {
    return mutate([&](Data& d) { return upsert_row(d, d.sites, std::move(e), "site"); });
  }
  std::uint64_t upsert(HardwareItem e) {
    return mutate([&](Data& d) { return upsert_row(d, d.hardware, std::move(e), "hardware"); });
  }
  std::uint64_t upsert(InverterDatasheet e) {
    return mutate(
        [&](Data& d) { return upsert_row(d, d.inverter_datasheets, std::move(e), "inverter_datasheet"); });
  }
  std::uint64_t upsert(PVDatasheet e) {
    return mutate([&](Data& d) { return upsert_row(d, d.pv_datasheets, std::move(e), "pv_datasheet"); });
  }
  std::uint64_t upsert(Tracker e) {
    return mutate([&](Data& d) { return upsert_row(d, d.trackers, std::move(e), "tracker"); });
  }
  std::uint64_t upsert(Inverter e) {
    return mutate([&](Data& d) { return upsert_row(d, d.inverters, std::move(e), "inverter"); });
  }
  std::uint64_t upsert(Battery e) {
    return mutate([&](Data& d) { return upsert_row(d, d.batteries, std::move(e), "battery"); });
  }
  std::uint64_t upsert(PVModule e) {
    return mutate([&](Data& d) { return upsert_row(d, d.modules, std::move(e), "module"); });
  }

  /// Stores the descriptor in its category and creates the global registry
  /// entry in the same atomic act. Returns the new global sensor id.
  SensorId register_sensor(SensorDescriptor descriptor) {
    SensorId assigned{};
    mutate([&](Data& d) {
      if (descriptor.id == 0) descriptor.id = take_next(d, "sensor_" + to_string(descriptor.category));
      for (const auto& s : d.sensors)
        if (s.category == descriptor.category && s.id == descriptor.id)
          throw DuplicateError("sensor " + to_string(descriptor.category) + "/" +
                               std::to_string(descriptor.id) + " already registered");
      SensorRegistryEntry entry;
      entry.sensor_id = SensorId{take_next(d, "sensor")};
      entry.category = descriptor.category;
      entry.category_local_id = descriptor.id;
      entry.registered_at = clock_();
      d.sensors.push_back(descriptor);
      d.registry.push_back(entry);
      assigned = entry.sensor_id;
      return entry.sensor_id.value;
    });
    return assigned;
  }

  /// Soft-deletes a sensor: it disappears from default listings but its
  /// lineage keeps resolving, and its id is never reused.
  void retire_sensor(SensorId sensor) {
    mutate([&](Data& d) {
      auto* entry = find_registry(d, sensor);
      if (!entry) throw UnknownSensorError("sensor " + std::to_string(sensor.value) + " not in registry");
      entry->retired = true;
      for (auto& s : d.sensors)
        if (s.category == entry->category && s.id == entry->category_local_id) s.retired = true;
      return sensor.value;
    });
  }

  /// Resolves the sensor through its equipment chain to the owning operator.
  std::vector<LineageEntry> lineage(SensorId sensor) const {
    const auto d = snapshot();
    const auto* entry = find_registry(*d, sensor);
    if (!entry) throw UnknownSensorError("sensor " + std::to_string(sensor.value) + " not in registry");
    const auto* desc = find_descriptor(*d, entry->category, entry->category_local_id);
    if (!desc) throw IntegrityError("registry entry without descriptor");  // validate() forbids this

    std::vector<LineageEntry> chain;
    chain.push_back({"sensor", sensor.value, to_string(desc->category)});
    if (const auto* m = desc->module_id ? find_by_id(d->modules, *desc->module_id) : nullptr) {
      chain.push_back({"module", m->id, hardware_label(*d, m->hardware_id)});
      if (const auto* inv = find_by_id(d->inverters, m->inverter_id))
        chain.push_back({"inverter", inv->id, hardware_label(*d, inv->hardware_id)});
    } else if (const auto* b = desc->battery_id ? find_by_id(d->batteries, *desc->battery_id) : nullptr) {
      chain.push_back({"battery", b->id, hardware_label(*d, b->hardware_id)});
      if (const auto* inv = find_by_id(d->inverters, b->inverter_id))
        chain.push_back({"inverter", inv->id, hardware_label(*d, inv->hardware_id)});
    } else if (const auto* inv = desc->inverter_id ? find_by_id(d->inverters, *desc->inverter_id) : nullptr) {
      chain.push_back({"inverter", inv->id, hardware_label(*d, inv->hardware_id)});
    }
    const auto* site = find_by_id(d->sites, desc->site_id);
    if (!site) throw IntegrityError("sensor site does not resolve");
    chain.push_back({"site", site->id, site->name});
    const auto* op = find_by_id(d->operators, site->operator_id);
    if (!op) throw IntegrityError("site operator does not resolve");
    chain.push_back({"operator", op->id, op->name});
    return chain;
  }

  std::vector<SensorRegistryEntry> list_sensors(const SensorFilter& filter = {}) const {
    const auto d = snapshot();
    std::vector<SensorRegistryEntry> out;
    for (const auto& entry : d->registry) {
      if (entry.retired && !filter.include_retired) continue;
      if (filter.category && entry.category != *filter.category) continue;
      if (filter.site_id) {
        const auto* desc = find_descriptor(*d, entry.category, entry.category_local_id);
        if (!desc || desc->site_id != *filter.site_id) continue;
      }
      out.push_back(entry);
    }
    std::sort(out.begin(), out.end(), [](const SensorRegistryEntry& a, const SensorRegistryEntry& b) {
      return a.sensor_id < b.sensor_id;
    });
    return out;
  }

  std::optional<SensorDescriptor> descriptor(SensorId sensor) const {
    const auto d = snapshot();
    const auto* entry = find_registry(*d, sensor);
    if (!entry) return std::nullopt;
    const auto* desc = find_descriptor(*d, entry->category, entry->category_local_id);
    if (!desc) return std::nullopt;
    return *desc;
  }

  bool is_registered(SensorId sensor) const {
    const auto d = snapshot();
    const auto* entry = find_registry(*d, sensor);
    return entry != nullptr && !entry->retired;
  }

  /// Predicate suitable for wiring into the ingest pipeline.
  std::function<bool(SensorId)> registration_check() const {
    return [this](SensorId s) { return is_registered(s); };
  }

  std::shared_ptr<const Data> snapshot() const {
    std::lock_guard lock(ptr_mu_);
    return data_;
  }

 private:
  static Timestamp system_clock() {
    return static_cast<Timestamp>(std::chrono::duration_cast<std::chrono::seconds>(
                                      std::chrono::system_clock::now().time_since_epoch())
                                      .count());
  }

  template <typename T>
  static const T* find_by_id(const std::vector<T>& rows, std::uint64_t id) {
    for (const auto& r : rows)
      if (r.id == id) return &r;
    return nullptr;
  }

  static const SensorRegistryEntry* find_registry(const Data& d, SensorId sensor) {
    for (const auto& e : d.registry)
      if (e.sensor_id == sensor) return &e;
    return nullptr;
  }

  static SensorRegistryEntry* find_registry(Data& d, SensorId sensor) {
    for (auto& e : d.registry)
      if (e.sensor_id == sensor) return &e;
    return nullptr;
  }

  static const SensorDescriptor* find_descriptor(const Data& d, SensorCategory cat,
                                                 std::uint64_t local_id) {
    for (const auto& s : d.sensors)
      if (s.category == cat && s.id == local_id) return &s;
    return nullptr;
  }

  static std::string hardware_label(const Data& d, std::uint64_t hardware_id) {
    const auto* hw = find_by_id(d.hardware, hardware_id);
    return hw ? hw->serial_number : std::string{};
  }

  static std::uint64_t take_next(Data& d, const std::string& table) {
    auto& n = d.next_id[table];
    if (n == 0) n = 1;
    return n++;
  }

  template <typename T>
  static std::uint64_t upsert_row(Data& d, std::vector<T>& rows, T row, const std::string& table) {
    if (row.id == 0) row.id = take_next(d, table);
    auto& n = d.next_id[table];
    if (row.id >= n) n = row.id + 1;
    for (auto& r : rows) {
      if (r.id == row.id) {
        r = std::move(row);
        return r.id;
      }
    }
    rows.push_back(std::move(row));
    return rows.back().id;
  }

  /// Applies `fn` to a copy of the data, validates the result in full,
  /// persists it, then publishes. Throws without side effects on failure.
  std::uint64_t mutate(const std::function<std::uint64_t(Data&)>& fn) {
    std::lock_guard wl(writer_mu_);
    auto next = std::make_shared<Data>(*snapshot());
    const std::uint64_t id = fn(*next);
    validate(*next);
    if (path_) atomic_write_file(*path_, serialize_document(*next));
    {
      std::lock_guard lock(ptr_mu_);
      data_ = std::move(next);
    }
    return id;
  }

  template <typename T>
  static void require_link(const Data&, const std::vector<T>& rows, std::uint64_t id,
                           const std::string& what, const std::string& owner) {
    if (!find_by_id(rows, id))
      throw IntegrityError(owner + " references missing " + what + " " + std::to_string(id));
  }

  template <typename T>
  static void require_same_site(const std::vector<T>& rows, std::uint64_t id,
                                std::uint64_t site_id, const std::string& what,
                                const std::string& owner) {
    const auto* row = find_by_id(rows, id);
    if (row && row->site_id != site_id)
      throw IntegrityError(owner + " links " + what + " " + std::to_string(id) +
                           " on a different site");
  }

  static void validate(const Data& d) {
    check_unique_ids(d.operators, "operator");
    check_unique_ids(d.sites, "site");
    check_unique_ids(d.hardware, "hardware");
    check_unique_ids(d.inverter_datasheets, "inverter_datasheet");
    check_unique_ids(d.pv_datasheets, "pv_datasheet");
    check_unique_ids(d.trackers, "tracker");
    check_unique_ids(d.inverters, "inverter");
    check_unique_ids(d.batteries, "battery");
    check_unique_ids(d.modules, "module");

    {
      std::set<std::string> serials;
      for (const auto& h : d.hardware)
        if (!serials.insert(h.serial_number).second)
          throw IntegrityError("duplicate hardware serial number '" + h.serial_number + "'");
    }
    check_unique_models(d.inverter_datasheets, "inverter_datasheet");
    check_unique_models(d.pv_datasheets, "pv_datasheet");

    for (const auto& s : d.sites) {
      const std::string owner = "site " + std::to_string(s.id);
      require_link(d, d.operators, s.operator_id, "operator", owner);
      if (s.latitude < -90 || s.latitude > 90)
        throw IntegrityError(owner + " latitude out of range");
      if (s.longitude < -180 || s.longitude > 180)
        throw IntegrityError(owner + " longitude out of range");
    }
    for (const auto& t : d.trackers) {
      const std::string owner = "tracker " + std::to_string(t.id);
      require_link(d, d.sites, t.site_id, "site", owner);
      require_link(d, d.hardware, t.hardware_id, "hardware", owner);
    }
    for (const auto& i : d.inverters) {
      const std::string owner = "inverter " + std::to_string(i.id);
      require_link(d, d.sites, i.site_id, "site", owner);
      require_link(d, d.hardware, i.hardware_id, "hardware", owner);
      require_link(d, d.inverter_datasheets, i.datasheet_id, "inverter_datasheet", owner);
    }
    for (const auto& b : d.batteries) {
      const std::string owner = "battery " + std::to_string(b.id);
      require_link(d, d.sites, b.site_id, "site", owner);
      require_link(d, d.hardware, b.hardware_id, "hardware", owner);
      require_link(d, d.inverters, b.inverter_id, "inverter", owner);
      require_same_site(d.inverters, b.inverter_id, b.site_id, "inverter", owner);
    }
    for (const auto& m : d.modules) {
      const std::string owner = "module " + std::to_string(m.id);
      require_link(d, d.sites, m.site_id, "site", owner);
      require_link(d, d.hardware, m.hardware_id, "hardware", owner);
      require_link(d, d.pv_datasheets, m.datasheet_id, "pv_datasheet", owner);
      require_link(d, d.inverters, m.inverter_id, "inverter", owner);
      require_same_site(d.inverters, m.inverter_id, m.site_id, "inverter", owner);
      if (m.tracker_id) {
        require_link(d, d.trackers, *m.tracker_id, "tracker", owner);
        require_same_site(d.trackers, *m.tracker_id, m.site_id, "tracker", owner);
        if (m.tilt || m.orientation)
          throw IntegrityError(owner + " is tracker-mounted but has fixed tilt/orientation");
      } else if (!m.tilt || !m.orientation) {
        throw IntegrityError(owner + " is fixed-mounted and needs both tilt and orientation");
      }
    }

    std::set<std::pair<int, std::uint64_t>> sensor_keys;
    for (const auto& s : d.sensors) {
      const std::string owner = to_string(s.category) + " sensor " + std::to_string(s.id);
      if (!sensor_keys.insert({static_cast<int>(s.category), s.id}).second)
        throw IntegrityError("duplicate " + owner);
      require_link(d, d.sites, s.site_id, "site", owner);
      require_link(d, d.hardware, s.hardware_id, "hardware", owner);
      if (s.category != SensorCategory::electricity &&
          (s.inverter_id || s.battery_id))
        throw IntegrityError(owner + " carries electricity-only links");
      if (s.module_id && s.category != SensorCategory::electricity &&
          s.category != SensorCategory::pv_temperature)
        throw IntegrityError(owner + " carries a module link");
      if (s.category == SensorCategory::pv_temperature && !s.module_id)
        throw IntegrityError(owner + " needs a module link");
      if (s.category == SensorCategory::irradiance && (!s.tilt || !s.orientation))
        throw IntegrityError(owner + " needs tilt and orientation");
      if (s.category != SensorCategory::irradiance && (s.tilt || s.orientation))
        throw IntegrityError(owner + " carries irradiance-only fields");
      if (s.module_id) {
        require_link(d, d.modules, *s.module_id, "module", owner);
        require_same_site(d.modules, *s.module_id, s.site_id, "module", owner);
      }
      if (s.inverter_id) {
        require_link(d, d.inverters, *s.inverter_id, "inverter", owner);
        require_same_site(d.inverters, *s.inverter_id, s.site_id, "inverter", owner);
      }
      if (s.battery_id) {
        require_link(d, d.batteries, *s.battery_id, "battery", owner);
        require_same_site(d.batteries, *s.battery_id, s.site_id, "battery", owner);
      }
    }

    std::set<std::uint64_t> global_ids;
    std::set<std::pair<int, std::uint64_t>> registered;
    for (const auto& e : d.registry) {
      if (!e.sensor_id.valid() || !global_ids.insert(e.sensor_id.value).second)
        throw IntegrityError("registry sensor id " + std::to_string(e.sensor_id.value) +
                             " duplicated or invalid");
      if (!registered.insert({static_cast<int>(e.category), e.category_local_id}).second)
        throw IntegrityError("two registry entries for " + to_string(e.category) + "/" +
                             std::to_string(e.category_local_id));
      if (!find_descriptor(d, e.category, e.category_local_id))
        throw IntegrityError("registry entry " + std::to_string(e.sensor_id.value) +
                             " has no descriptor");
    }
    // every descriptor has exactly one registry entry
    for (const auto& s : d.sensors)
      if (!registered.count({static_cast<int>(s.category), s.id}))
        throw IntegrityError(to_string(s.category) + " sensor " + std::to_string(s.id) +
                             " missing from the registry");
  }

  template <typename T>
  static void check_unique_ids(const std::vector<T>& rows, const std::string& table) {
    std::set<std::uint64_t> ids;
    for (const auto& r : rows) {
      if (r.id == 0) throw IntegrityError(table + " with id 0");
      if (!ids.insert(r.id).second)
        throw IntegrityError("duplicate " + table + " id " + std::to_string(r.id));
    }
  }

  template <typename T>
  static void check_unique_models(const std::vector<T>& rows, const std::string& table) {
    std::set<std::pair<std::string, std::string>> models;
    for (const auto& r : rows)
      if (!models.insert({r.manufacturer, r.model}).second)
        throw IntegrityError("duplicate " + table + " (" + r.manufacturer + ", " + r.model + ")");
  }

  static std::vector<std::uint8_t> serialize_document(const Data& d);
  static Data parse_document(const std::vector<std::uint8_t>& bytes);

  std::optional<std::filesystem::path> path_;
  Clock clock_;
  mutable std::mutex ptr_mu_;
  std::shared_ptr<const Data> data_;
  std::mutex writer_mu_;
};

// --- JSON document mapping -------------------------------------------------

namespace detail {

using nlohmann::json;

inline json to_json(const RatedParameter& p) { return {{"value", p.value}, {"unit", p.unit}}; }

inline json params_json(const std::map<std::string, RatedParameter>& params) {
  json j = json::object();
  for (const auto& [k, v] : params) j[k] = to_json(v);
  return j;
}

inline std::map<std::string, RatedParameter> params_from(const json& j) {
  std::map<std::string, RatedParameter> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out[it.key()] = {it.value().at("value").get<double>(),
                     it.value().at("unit").get<std::string>()};
  return out;
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (const auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<T>();
  return std::nullopt;
}

}  // namespace detail

inline std::vector<std::uint8_t> Catalog::serialize_document(const Data& d) {
  using nlohmann::json;
  json doc;
  doc["catalog_version"] = kCatalogVersion;
  doc["next_id"] = d.next_id;

  auto& ops = doc["operators"] = json::array();
  for (const auto& e : d.operators)
    ops.push_back({{"id", e.id}, {"name", e.name}, {"contact", e.contact}, {"retired", e.retired}});

  auto& sites = doc["sites"] = json::array();
  for (const auto& e : d.sites)
    sites.push_back({{"id", e.id},
                     {"operator_id", e.operator_id},
                     {"name", e.name},
                     {"latitude", e.latitude},
                     {"longitude", e.longitude},
                     {"elevation", e.elevation},
                     {"retired", e.retired}});

  auto& hw = doc["hardware"] = json::array();
  for (const auto& e : d.hardware)
    hw.push_back({{"id", e.id},
                  {"serial_number", e.serial_number},
                  {"description", e.description},
                  {"retired", e.retired}});

  auto& ids = doc["inverter_datasheets"] = json::array();
  for (const auto& e : d.inverter_datasheets)
    ids.push_back({{"id", e.id},
                   {"manufacturer", e.manufacturer},
                   {"model", e.model},
                   {"rated_parameters", detail::params_json(e.rated_parameters)},
                   {"retired", e.retired}});

  auto& pds = doc["pv_datasheets"] = json::array();
  for (const auto& e : d.pv_datasheets)
    pds.push_back({{"id", e.id},
                   {"manufacturer", e.manufacturer},
                   {"model", e.model},
                   {"rated_parameters", detail::params_json(e.rated_parameters)},
                   {"retired", e.retired}});

  auto& trs = doc["trackers"] = json::array();
  for (const auto& e : d.trackers)
    trs.push_back({{"id", e.id},
                   {"site_id", e.site_id},
                   {"hardware_id", e.hardware_id},
                   {"axis_configuration", e.axis_configuration},
                   {"retired", e.retired}});

  auto& invs = doc["inverters"] = json::array();
  for (const auto& e : d.inverters)
    invs.push_back({{"id", e.id},
                    {"site_id", e.site_id},
                    {"hardware_id", e.hardware_id},
                    {"datasheet_id", e.datasheet_id},
                    {"retired", e.retired}});

  auto& bats = doc["batteries"] = json::array();
  for (const auto& e : d.batteries)
    bats.push_back({{"id", e.id},
                    {"site_id", e.site_id},
                    {"hardware_id", e.hardware_id},
                    {"inverter_id", e.inverter_id},
                    {"retired", e.retired}});

  auto& mods = doc["modules"] = json::array();
  for (const auto& e : d.modules) {
    nlohmann::json m = {{"id", e.id},
                        {"site_id", e.site_id},
                        {"hardware_id", e.hardware_id},
                        {"datasheet_id", e.datasheet_id},
                        {"inverter_id", e.inverter_id},
                        {"retired", e.retired}};
    detail::put_optional(m, "tracker_id", e.tracker_id);
    detail::put_optional(m, "tilt", e.tilt);
    detail::put_optional(m, "orientation", e.orientation);
    mods.push_back(std::move(m));
  }

  auto& sens = doc["sensors"] = json::array();
  for (const auto& e : d.sensors) {
    nlohmann::json s = {{"id", e.id},
                        {"category", to_string(e.category)},
                        {"site_id", e.site_id},
                        {"hardware_id", e.hardware_id},
                        {"unit", e.unit},
                        {"retired", e.retired}};
    detail::put_optional(s, "module_id", e.module_id);
    detail::put_optional(s, "inverter_id", e.inverter_id);
    detail::put_optional(s, "battery_id", e.battery_id);
    detail::put_optional(s, "tilt", e.tilt);
    detail::put_optional(s, "orientation", e.orientation);
    sens.push_back(std::move(s));
  }

  auto& reg = doc["registry"] = json::array();
  for (const auto& e : d.registry)
    reg.push_back({{"sensor_id", e.sensor_id.value},
                   {"category", to_string(e.category)},
                   {"category_local_id", e.category_local_id},
                   {"registered_at", e.registered_at},
                   {"retired", e.retired}});

  const std::string text = doc.dump(2) + "\n";
  return {text.begin(), text.end()};
}

inline Catalog::Data Catalog::parse_document(const std::vector<std::uint8_t>& bytes) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("catalog document is not valid JSON: ") + e.what());
  }
  try {
    const int version = doc.at("catalog_version").get<int>();
    if (version != kCatalogVersion)
      throw ParseError("unsupported catalog_version " + std::to_string(version));

    Data d;
    if (doc.contains("next_id"))
      d.next_id = doc["next_id"].get<std::map<std::string, std::uint64_t>>();
    for (const auto& j : doc.value("operators", json::array()))
      d.operators.push_back({j.at("id"), j.at("name"), j.at("contact"), j.value("retired", false)});
    for (const auto& j : doc.value("sites", json::array()))
      d.sites.push_back({j.at("id"), j.at("operator_id"), j.at("name"), j.at("latitude"),
                         j.at("longitude"), j.at("elevation"), j.value("retired", false)});
    for (const auto& j : doc.value("hardware", json::array()))
      d.hardware.push_back(
          {j.at("id"), j.at("serial_number"), j.at("description"), j.value("retired", false)});
    for (const auto& j : doc.value("inverter_datasheets", json::array()))
      d.inverter_datasheets.push_back({j.at("id"), j.at("manufacturer"), j.at("model"),
                                       detail::params_from(j.at("rated_parameters")),
                                       j.value("retired", false)});
    for (const auto& j : doc.value("pv_datasheets", json::array()))
      d.pv_datasheets.push_back({j.at("id"), j.at("manufacturer"), j.at("model"),
                                 detail::params_from(j.at("rated_parameters")),
                                 j.value("retired", false)});
    for (const auto& j : doc.value("trackers", json::array()))
      d.trackers.push_back({j.at("id"), j.at("site_id"), j.at("hardware_id"),
                            j.at("axis_configuration"), j.value("retired", false)});
    for (const auto& j : doc.value("inverters", json::array()))
      d.inverters.push_back({j.at("id"), j.at("site_id"), j.at("hardware_id"),
                             j.at("datasheet_id"), j.value("retired", false)});
    for (const auto& j : doc.value("batteries", json::array()))
      d.batteries.push_back({j.at("id"), j.at("site_id"), j.at("hardware_id"),
                             j.at("inverter_id"), j.value("retired", false)});
    for (const auto& j : doc.value("modules", json::array())) {
      PVModule m;
      m.id = j.at("id");
      m.site_id = j.at("site_id");
      m.hardware_id = j.at("hardware_id");
      m.datasheet_id = j.at("datasheet_id");
      m.inverter_id = j.at("inverter_id");
      m.tracker_id = detail::get_optional<std::uint64_t>(j, "tracker_id");
      m.tilt = detail::get_optional<double>(j, "tilt");
      m.orientation = detail::get_optional<double>(j, "orientation");
      m.retired = j.value("retired", false);
      d.modules.push_back(std::move(m));
    }
    for (const auto& j : doc.value("sensors", json::array())) {
      SensorDescriptor s;
      s.id = j.at("id");
      s.category = sensor_category_from_string(j.at("category").get<std::string>());
      s.site_id = j.at("site_id");
      s.hardware_id = j.at("hardware_id");
      s.module_id = detail::get_optional<std::uint64_t>(j, "module_id");
      s.inverter_id = detail::get_optional<std::uint64_t>(j, "inverter_id");
      s.battery_id = detail::get_optional<std::uint64_t>(j, "battery_id");
      s.tilt = detail::get_optional<double>(j, "tilt");
      s.orientation = detail::get_optional<double>(j, "orientation");
      s.unit = j.at("unit");
      s.retired = j.value("retired", false);
      d.sensors.push_back(std::move(s));
    }
    for (const auto& j : doc.value("registry", json::array()))
      d.registry.push_back({SensorId{j.at("sensor_id")},
                            sensor_category_from_string(j.at("category").get<std::string>()),
                            j.at("category_local_id"), j.at("registered_at"),
                            j.value("retired", false)});
    return d;
  } catch (const json::exception& e) {
    throw ParseError(std::string("catalog document has a malformed field: ") + e.what());
  }
}

}  // namespace svault
