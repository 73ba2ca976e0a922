def build_tools():
    return []
