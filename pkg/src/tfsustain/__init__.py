"""tfsustain: sustainability smell analysis for Terraform configurations."""

__version__ = "0.1.0"
