#pragma once

#include <cmath>

namespace fdpc {

// dB / dBm conversions. Everything inside the library is SI linear
// (W, m, Hz); these are for the config boundary only.

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace fdpc
