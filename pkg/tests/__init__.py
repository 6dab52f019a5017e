# Tests for YAML Diff Tool
