# Tests for pyk3fibration
