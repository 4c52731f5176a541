#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "shaperet/bow.hpp"
#include "shaperet/descriptors.hpp"
#include "shaperet/reduction.hpp"

// Little-endian binary containers. Each starts with a 4-byte magic and a
// u32 version; strings are u32 length + bytes, matrices are row-major f64.

namespace shaperet {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_field(const DescriptorField& field, const std::filesystem::path& path);
DescriptorField read_field(const std::filesystem::path& path);

void write_model(const ReductionModel& model, const std::filesystem::path& path);
ReductionModel read_model(const std::filesystem::path& path);

void write_dictionary(const Dictionary& dict, const std::filesystem::path& path);
Dictionary read_dictionary(const std::filesystem::path& path);

/// Tagged matrix, used for reduced vector populations.
void write_matrix(const RowMatrix& m, const std::string& tag, const std::filesystem::path& path);
RowMatrix read_matrix(const std::filesystem::path& path, std::string* tag = nullptr);

void write_signatures(const std::vector<Signature>& sigs, const std::filesystem::path& path);
std::vector<Signature> read_signatures(const std::filesystem::path& path);

void write_distance_matrix_bin(const DistanceMatrix& dm, const std::filesystem::path& path);
DistanceMatrix read_distance_matrix_bin(const std::filesystem::path& path);

/// First row and column hold the mesh ids; the corner cell is empty.
std::string serialize_distance_matrix_csv(const DistanceMatrix& dm);
DistanceMatrix parse_distance_matrix_csv(std::string_view text);
void write_distance_matrix_csv(const DistanceMatrix& dm, const std::filesystem::path& path);
/// Reads either format, chosen by the file's magic bytes.
DistanceMatrix read_distance_matrix(const std::filesystem::path& path);

}  // namespace shaperet
