from zsm.main import cli

cli(prog_name="zsm")
