"""Display ASCII art banner"""
from config.constants import VERSION


def display_banner():
    """Display ASCII art banner"""
    print(f"""
██████╗ ██╗  ████████╗
██╔══██╗██║  ╚══██╔══╝
██║  ██║██║     ██║
██║  ██║██║     ██║
██████╔╝███████╗██║
╚═════╝ ╚══════╝╚═╝   codes v{VERSION}

Buffer-based distributed LT codes
Simulate, predict and design relay-degree distributions
""")
