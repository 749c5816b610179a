#pragma once

#include <filesystem>
#include <string>

#include "phaseless/forward.hpp"
#include "phaseless/signal.hpp"

namespace phaseless::io {

// Signals: CSV "index,re,im" or JSON {"n":N,"re":[...],"im":[...]} (+ "shape":[r,c] for 2D).
// Doubles are written with 17 significant digits so text round-trips bit-exactly.
std::string signal_to_csv(const Signal& x);
Signal signal_from_csv(const std::string& text);
std::string signal_to_json(const Signal& x);
Signal signal_from_json(const std::string& text);

// Measurements: a JSON descriptor next to a CSV matrix (row m, column k).
std::string measurement_descriptor_json(const MeasurementSet& y);
std::string measurement_matrix_csv(const MeasurementSet& y);
MeasurementSet measurement_from_text(const std::string& descriptor_json, const std::string& matrix_csv);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

// Writes <base>.json and <base>.csv.
void save_measurement(const MeasurementSet& y, const std::filesystem::path& base);
// Accepts either the .json or the .csv path (or the bare base).
MeasurementSet load_measurement(const std::filesystem::path& path);

void save_signal(const Signal& x, const std::filesystem::path& path);  // format from extension
Signal load_signal(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace phaseless::io
