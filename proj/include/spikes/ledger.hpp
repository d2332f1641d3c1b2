#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "spikes/ladder.hpp"
#include "spikes/run_config.hpp"

namespace spikes {

/// Shortest round-trip decimal form ("%.17g"); "inf", "-inf", "nan" otherwise.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& os) const;
};

/// Appends rows to an existing CSV (header must match) or creates it.
void append_csv(const std::string& path, const CsvTable& table);
/// Overwrites `path` with the table.
void write_csv(const std::string& path, const CsvTable& table);
void write_json(const std::string& path, const nlohmann::json& j);

/// One row per ladder step. Column order is frozen; new columns go at the end.
/// Positions are physical coordinates, ';'-separated ("x y" in 2D).
/// energy_step uses the lattice reference I_h; energy_step_continuum uses I(w).
CsvTable ladder_table(const LadderResult& ladder, const std::string& hash, int dim);

/// Summary row for the append-only experiment ledger.
CsvTable run_summary(const std::string& command, const std::string& hash, std::size_t k, double M, double metric,
                     bool pass);

}  // namespace spikes
