"""Contains soft_mkdir_for function"""
import os


def soft_mkdir_for(file_path: str):
    """Creates the folder an output artifact will be written to, if missing

    Args:
        file_path (str): path of the artifact
    """
    folder = os.path.dirname(os.path.abspath(file_path))
    if os.path.isdir(folder):
        return
    os.makedirs(folder)
