// Regenerates the committed sample data files. Run from the repository
// root: build/tools/lifecast_gen_data [data]
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lifecast/synthetic.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << (dir / name).string() << '\n';
      std::exit(1);
    }
    out << content;
    std::cout << "wrote " << (dir / name).string() << '\n';
  };
  write("hmd_sample_female.txt", lifecast::sample_hmd_text(lifecast::Sex::Female));
  write("hmd_sample_male.txt", lifecast::sample_hmd_text(lifecast::Sex::Male));
  return 0;
}
