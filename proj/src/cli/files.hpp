#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace openmax::cli {

// Raised for unreadable inputs and unwritable outputs (exit code 2).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);

// Collects output files in memory and publishes them together: each file is
// written to a temporary sibling and renamed into place only once every
// temporary has been written successfully.
class StagedFiles {
public:
    void add(std::filesystem::path path, std::string contents);
    // Throws IoError when a target directory is missing before anything is
    // written.
    void check_targets() const;
    std::vector<std::filesystem::path> commit();

private:
    std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

}  // namespace openmax::cli
