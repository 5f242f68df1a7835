// Writes <out_dir>/<name>.png for every golden shader case.

#include <filesystem>
#include <iostream>

#include "procam/image_io.hpp"
#include "shader_refs.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: procam_golden_gen OUT_DIR\n";
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  for (const auto& c : procam::golden::cases()) {
    procam::io::write_png(dir / (c.name + ".png"), procam::golden::render_reference(c));
    std::cout << c.name << "\n";
  }
  return 0;
}
