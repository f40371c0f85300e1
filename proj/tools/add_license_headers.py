#!/usr/bin/env python3
"""Prepends the Apache-2.0 header to source and build files that lack it."""

import pathlib
import sys

NOTICE = """Copyright 2026 The Scalepool Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License."""

ROOTS = ["CMakeLists.txt", "core", "tools", "tests", "benchmarks"]
SLASH = {".cc", ".h"}


def header(prefix):
  return "".join((prefix + " " + line).rstrip() + "\n" for line in NOTICE.splitlines()) + "\n"


def wanted(path):
  return path.suffix in SLASH or path.suffix in {".cmake", ".in", ".py"} or path.name == "CMakeLists.txt"


def main():
  root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")
  changed = 0
  for entry in ROOTS:
    base = root / entry
    paths = [base] if base.is_file() else sorted(p for p in base.rglob("*") if p.is_file())
    for path in paths:
      if not wanted(path):
        continue
      text = path.read_text()
      if "Copyright 2026 The Scalepool Authors." in text[:400]:
        continue
      block = header("//" if path.suffix in SLASH else "#")
      if text.startswith("#!"):
        shebang, _, rest = text.partition("\n")
        text = shebang + "\n" + block + rest
      else:
        text = block + text
      path.write_text(text)
      changed += 1
  print(f"{changed} files updated")


if __name__ == "__main__":
  main()
