#include "cli/files.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace openmax::cli {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void StagedFiles::add(fs::path path, std::string contents) { files_.emplace_back(std::move(path), std::move(contents)); }

void StagedFiles::check_targets() const {
    for (const auto& [path, contents] : files_) {
        const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
        std::error_code ec;
        if (!fs::is_directory(dir, ec)) throw IoError("output directory does not exist: " + dir.string());
    }
}

std::vector<fs::path> StagedFiles::commit() {
    check_targets();
    std::vector<fs::path> temps;
    auto cleanup = [&] {
        std::error_code ec;
        for (const auto& t : temps) fs::remove(t, ec);
    };
    for (const auto& [path, contents] : files_) {
        fs::path tmp = path;
        tmp += ".tmp";
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << contents;
        out.close();
        if (!out) {
            cleanup();
            throw IoError("cannot write " + path.string());
        }
    }
    std::vector<fs::path> written;
    for (std::size_t i = 0; i < files_.size(); ++i) {
        std::error_code ec;
        fs::rename(temps[i], files_[i].first, ec);
        if (ec) {
            cleanup();
            throw IoError("cannot move " + temps[i].string() + " into place: " + ec.message());
        }
        written.push_back(files_[i].first);
    }
    files_.clear();
    return written;
}

}  // namespace openmax::cli
