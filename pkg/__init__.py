"""
ComfyUI-MomentForge
Custom nodes for the truncated matricial Stieltjes moment problem
"""

from .momentforge import NODE_CLASS_MAPPINGS as MomentForge_MAPPINGS, NODE_DISPLAY_NAME_MAPPINGS as MomentForge_DISPLAY

NODE_CLASS_MAPPINGS = {}
NODE_CLASS_MAPPINGS.update(MomentForge_MAPPINGS)

NODE_DISPLAY_NAME_MAPPINGS = {}
NODE_DISPLAY_NAME_MAPPINGS.update(MomentForge_DISPLAY)

__all__ = ["NODE_CLASS_MAPPINGS", "NODE_DISPLAY_NAME_MAPPINGS"]
__version__ = "2.0.0"
__author__ = "hdelmont"
